#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bridgenav/bridge.hpp"

namespace bridgenav {

enum class ReachDirection { kForward, kBackward };

// Positions reachable from (forward) or able to reach (backward) the convex
// hull of `anchors` within time tau, ignoring obstacles.
struct ReachRegion {
  std::vector<Vec> anchors;
  double tau = 0.0;
  ReachDirection direction = ReachDirection::kForward;

  bool valid(int dimension) const;
};

// Minimum travel time between q and any point of the anchor hull.
double region_travel_time(const ReachRegion& region, const Vec& q, const AgentLimits& limits);

// region_travel_time(region, q) < tau.
bool region_contains(const ReachRegion& region, const Vec& q, const AgentLimits& limits);

// Smallest L-infinity distance from q to the convex hull of `hull`, which is
// a point, a segment, or a planar convex polygon with vertices in order.
double linf_distance_to_hull(std::span<const Vec> hull, const Vec& q);

// Workspace diameter / v_max + 2 v_max / a_max.
double default_tau(const Aabb& bounds, const AgentLimits& limits);

struct AgentTask {
  Vec start;
  Vec goal;
  friend bool operator==(const AgentTask&, const AgentTask&) = default;
};

struct BridgeSite {
  Bridge bridge;
  Entrance entrance;
  ReachRegion backward;  // anchored on the entrance's outer gate
  ReachRegion forward;   // anchored on the bridge end gate
  int seed_agent = -1;
};

struct AssignConfig {
  BridgeConfig bridge;
  double widen_step = 0.0;        // <= 0: radius / 2
  double tau = 0.0;               // <= 0: default_tau(bridge.rrt.bounds, limits)
  double narrow_clearance = 0.0;  // <= 0: 2 * radius
  int placement_attempts = 4;
};

struct Assignment {
  std::vector<int> bridge_of;  // agent index -> site index
  std::vector<BridgeSite> sites;
};

// Extra per-pair acceptance test, called after both membership predicates hold.
using AssignFilter = std::function<bool(int agent, int site_index, const BridgeSite& site)>;

struct BridgePlacement {
  Vec start;
  Vec end;
  Aabb region;  // sampling box for the boundary planner
};

// Chooses the gate centers of a bridge serving start -> goal: a geometric
// RRT-Connect path is cut just before its first and after its last narrow
// waypoint (clearance below the threshold), backed off by `backoff` along the
// path. The region covers the kept stretch plus v_max^2 / a_max + radius.
Outcome<BridgePlacement> place_bridge(const Vec& start, const Vec& goal, const ObstacleSet& obstacles,
                                          const AgentLimits& limits, const AssignConfig& cfg, double backoff,
                                          std::uint64_t seed);

// Greedy bridge generation: the lowest-index unassigned agent seeds a new
// bridge, which is then given to every unassigned agent whose start lies in
// its backward region and goal in its forward region. `obstacles` must be
// inflated by the agent radius.
Outcome<Assignment> assign_bridges(std::span<const AgentTask> agents, const ObstacleSet& obstacles,
                                   const AgentLimits& limits, const AssignConfig& cfg,
                                   const AssignFilter& filter = {});

}  // namespace bridgenav
