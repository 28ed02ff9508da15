#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "bridgenav/bridge.hpp"

namespace bridgenav {

// Waypoint indices where the entrance, bridge and departure phases begin.
// The bridge occupies [bridge, exit]; exit is the bridge's last waypoint.
struct PhaseMarks {
  std::size_t entrance = 0;
  std::size_t bridge = 0;
  std::size_t exit = 0;
};

// A composed route postponed by delay_steps steps. Before departure the agent
// holds its first pose, after arrival its last.
struct Plan {
  int agent = -1;
  int bridge = -1;              // -1: no bridge phase
  std::vector<double> weights;  // convex weights over the bridge boundaries
  long delay_steps = 0;
  Trajectory trajectory;
  PhaseMarks marks;

  double dt() const { return trajectory.dt(); }
  double delay() const { return static_cast<double>(delay_steps) * dt(); }
  long horizon() const { return static_cast<long>(trajectory.horizon()); }
  long end_step() const { return delay_steps + horizon(); }
  Vec position(long step) const;  // at global step `step`
};

// Exhaustive waypoint scan: earliest global time at which the centers are
// closer than 2r - kGeomEps, skipping steps where both agents still hold
// their start poses. Without held poses only the common moving window counts.
std::optional<double> plans_collide(const Plan& a, const Plan& b, double r, bool hold_poses = true);

// Block hierarchy over a plan's waypoints for range-box queries.
class PlanIndex {
 public:
  static constexpr long kBlock = 16;

  PlanIndex() = default;
  explicit PlanIndex(const Trajectory& t);

  // Box of the local waypoints [lo, hi], clamped to the trajectory.
  Aabb range_box(long lo, long hi) const;
  long blocks() const { return blocks_; }
  long leaves() const { return leaves_; }
  const Aabb& node(long i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<Vec>& points() const { return points_; }

 private:
  std::vector<Vec> points_;
  std::vector<Aabb> nodes_;  // implicit binary tree, root 1, leaves at leaves_ + b
  long blocks_ = 0;
  long leaves_ = 1;
};

// Per-bridge data for certifying that two agents inside the same bridge stay
// apart: with entry offset d steps and weight distance beta, the trailing
// agent's separation is bounded below using the boundary waypoints alone.
class BridgeTracks {
 public:
  BridgeTracks() = default;
  explicit BridgeTracks(std::span<const Bridge> bridges);

  // True iff every pair of interpolated trajectories in `bridge` whose
  // weights differ by at most beta (L1) and whose entries are `offset` steps
  // apart keeps center distance >= 2r while both are inside.
  bool certified(int bridge, long offset, double beta, double r) const;
  std::size_t size() const { return tracks_.size(); }

 private:
  struct Track {
    std::vector<std::vector<Vec>> boundary;  // [k][t]
    std::vector<Vec> center;
    std::vector<double> diameter;
  };
  double lower_bound(const Track& t, long offset, double beta) const;

  std::vector<Track> tracks_;
  mutable std::map<std::tuple<int, long, int>, double> cache_;
};

struct PairCheck {
  std::optional<double> collision;
  int checks = 0;  // leaf block scans plus bridge certificates
};

// Same result as plans_collide, pruning time windows whose position boxes
// are at least 2r apart and, when `tracks` is given, windows where both plans
// cross the same bridge under a valid certificate.
PairCheck plans_collide_pruned(const Plan& a, const PlanIndex& ia, const Plan& b, const PlanIndex& ib, double r,
                               const BridgeTracks* tracks = nullptr, bool hold_poses = true);

struct ScheduleConfig {
  double delta = 0.0;          // postponement step in seconds; <= 0: dt
  double cap_factor = 1000.0;  // delay cap as a multiple of the plan horizon
  bool pruned = true;
  bool hold_poses = true;
  const BridgeTracks* tracks = nullptr;
};

struct ScheduleStats {
  long pair_checks = 0;
  long segment_checks = 0;
  long postponements = 0;
};

// Postpones plans in order: plan i gets the smallest delay (scanned upward
// from its input delay in steps of delta) at which it collides with none of
// plans 0..i-1.
Outcome<std::vector<Plan>> schedule_all(std::vector<Plan> plans, double r, const ScheduleConfig& cfg = {},
                                        ScheduleStats* stats = nullptr);

}  // namespace bridgenav
