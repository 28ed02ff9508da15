#pragma once

#include <cstdint>
#include <vector>

#include "bridgenav/dynamics.hpp"
#include "bridgenav/geom.hpp"

namespace bridgenav {

// Derives an independent seed from (seed, salt) with a splitmix64 round.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

struct RrtConfig {
  int max_iterations = 50000;
  double goal_bias = 0.1;
  double steer_duration = 0.25;  // seconds; 5 * dt at the default dt
  double dt = 0.05;
  double goal_position_tol = 0.5;
  double goal_velocity_tol = 0.5;
  std::uint64_t seed = 1;
  Aabb bounds;                // sampling region for positions
  int steer_candidates = 8;   // random controls tried per extension

  bool valid() const;
};

struct RrtNode {
  State state;
  int parent = -1;
  Vec accel;                 // nominal control of the incoming edge
  std::vector<Waypoint> edge;  // incoming edge, parent state first
};

struct RrtStats {
  int iterations = 0;
  int nodes = 0;
  int connect_attempts = 0;
};

// Kinodynamic RRT. Obstacles are used as given (callers pass the set already
// inflated for the agent). Every waypoint of the result and every segment
// between consecutive waypoints is collision-free, and the result is a pure
// function of the arguments.
Outcome<Trajectory> plan(const State& start, const State& goal, const ObstacleSet& obstacles,
                         const AgentLimits& limits, const RrtConfig& cfg, RrtStats* stats = nullptr);

// Holonomic RRT-Connect with straight segments of at most `step`, sampling
// `bounds` (dimension 2 keeps z = 0). Returns the path start..goal after
// greedy shortcutting.
Outcome<std::vector<Vec>> geometric_path(const Vec& start, const Vec& goal, const ObstacleSet& obstacles,
                                         const Aabb& bounds, int dimension, double step, int max_iterations,
                                         std::uint64_t seed);

// True iff any waypoint segment of t meets an obstacle.
bool trajectory_hits_obstacles(const Trajectory& t, const ObstacleSet& obstacles);

// Dense audit: the exact piecewise-quadratic path sampled `substeps` times per
// step, each sub-segment tested against the obstacles.
bool trajectory_hits_obstacles_dense(const Trajectory& t, const ObstacleSet& obstacles, int substeps);

// Returns a trajectory that starts at traj's first position with velocity
// exactly v0 and has exactly horizon + 1 waypoints. A mismatched initial
// velocity is fixed by splicing an optimal_connect prefix onto a later
// waypoint; a short trajectory ending at rest is padded with a terminal dwell.
Outcome<Trajectory> enforce_boundary_conditions(const Trajectory& traj, const Vec& v0, std::size_t horizon,
                                                const AgentLimits& limits);

}  // namespace bridgenav
