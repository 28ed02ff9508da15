#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bridgenav/reach.hpp"
#include "bridgenav/schedule.hpp"

namespace bridgenav {

struct Scenario {
  std::string name;
  int dimension = 2;
  Aabb bounds;
  std::vector<Obstacle> obstacles;  // core shapes; inflation is added per agent radius
  AgentLimits limits;
  std::vector<AgentTask> agents;
  double dt = 0.0;                  // <= 0: min(0.05, r / (4 v_max))
  std::uint64_t seed = 1;
  double tau = 0.0;                 // <= 0: default_tau(bounds, limits)

  double effective_dt() const;
  double effective_tau() const;
  ObstacleSet inflated_obstacles() const;  // by the agent radius
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Invariant violations, each prefixed with the offending field path
// (e.g. "agents[3].start").
std::vector<std::string> scenario_violations(const Scenario& s);

enum class Phase { kApproach = 0, kEntrance = 1, kBridge = 2, kDepart = 3 };
const char* to_string(Phase phase);
Phase phase_of(const Plan& plan, std::size_t index);

struct PhaseTiming {
  double assign = 0.0;
  double compose = 0.0;
  double schedule = 0.0;
  double audit = 0.0;
  double interpolate_median = 0.0;  // per agent, seconds
};

struct SimMetrics {
  long agent_agent_collision_events = 0;
  long agent_obstacle_collision_events = 0;
  long frames = 0;             // steps until the last agent arrives
  double frames_seconds = 0.0;
  int bridge_count = 0;
  long pair_checks = 0;        // during scheduling
  long segment_checks = 0;
  long same_bridge_pairs = 0;  // audit of the final plans
  long same_bridge_segment_checks = 0;
  long pruned_mismatches = 0;  // pruned vs exhaustive disagreements on final plans
  double max_junction_jump = 0.0;
  PhaseTiming timing;
};

struct SimResult {
  double dt = 0.0;
  std::vector<Plan> plans;  // indexed by agent
  std::vector<BridgeSite> sites;
  SimMetrics metrics;
};

struct AuditCounts {
  long agent_agent = 0;
  long agent_obstacle = 0;
};

// Radius the scheduler works with: r plus half the largest amount by which
// the distance of two agents can dip between waypoints where it is at least
// 2r, (v_max dt)^2 / (2r) + a_max dt^2 / 4.
double scheduling_radius(const AgentLimits& limits, double dt);

// Largest velocity jump across the phase junctions of a plan.
double junction_jump(const Plan& plan);

// Four-phase route: optimal approach to the entrance's outer gate arriving
// with the entry velocity, entrance adjustment, bridge interpolation, and an
// optimal departure to the goal at rest.
Outcome<Plan> compose_plan(int agent, const AgentTask& task, int site_index, const BridgeSite& site,
                           const AgentLimits& limits, double dt);

// True iff the plan respects the limits and its dense path misses the
// (inflated) obstacles.
bool plan_is_clear(const Plan& plan, const ObstacleSet& obstacles, const AgentLimits& limits);

// Event counts from positions sampled `substeps` times per step. An event is
// a maximal run of consecutive samples in which a pair (or an agent and the
// obstacles) overlaps.
AuditCounts audit(const std::vector<Plan>& plans, const Scenario& s, int substeps = 10);

struct RunOptions {
  bool measure_interpolation = true;
  bool check_pruning = true;  // compare pruned and exhaustive on final same-bridge pairs
};

Outcome<SimResult> run_scenario(const Scenario& s, const RunOptions& options = {});

}  // namespace bridgenav
