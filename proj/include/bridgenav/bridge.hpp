#pragma once

#include <array>
#include <vector>

#include "bridgenav/dynamics.hpp"
#include "bridgenav/geom.hpp"
#include "bridgenav/rrt.hpp"

namespace bridgenav {

// Local frame of a bridge's start gate. `forward` is the entry direction; the
// gate lies in the plane through `origin` orthogonal to it.
struct GateFrame {
  Vec origin;
  Vec forward;
  Vec side;   // 2D: points toward boundary 0
  Vec side2;  // 3D only
};

struct Bridge {
  int dimension = 2;
  double dt = 0.0;
  Vec v0;                              // shared entry velocity, |v0| = v_max
  GateFrame frame;
  std::vector<Trajectory> boundaries;  // 2 in 2D (0 = upper, 1 = lower), K in 3D
  std::vector<Vec> start_gate;         // boundaries[k].front().p
  std::vector<Vec> end_gate;           // boundaries[k].back().p
  TriangulatedStrip strip;
  double half_width = 0.0;             // offset of the outermost boundaries
  int widenings = 0;                   // accepted widening steps
  bool truncated = false;              // widening stopped by a boundary planning failure

  std::size_t horizon() const { return boundaries.empty() ? 0 : boundaries.front().horizon(); }
  Vec start_center() const;
  Vec end_center() const;
};

struct BridgeConfig {
  RrtConfig rrt;
  int gate_points = 6;          // K for 3D bridges
  int max_widenings = 64;
  double max_half_width = 1e9;
  // Extra obstacle inflation on top of each obstacle's own, covering the
  // bulge of a constant-acceleration arc beyond its chord.
  double chord_margin = -1.0;   // < 0: a_max * dt^2 / 8 + 1e-6
};

// Builds the widest bridge from p0 to pT found by widening in steps of
// widen_step. Boundaries start with velocity v_max * unit(pT - p0) and
// end at rest. Errors when even the zero-width bridge cannot be planned.
Outcome<Bridge> construct_bridge(const Vec& p0, const Vec& pT, const ObstacleSet& obstacles,
                                 const AgentLimits& limits, double widen_step, const BridgeConfig& cfg);

// Convex weights over boundary indices reproducing an entry point on the
// start gate.
struct InterpolationWeights {
  std::vector<int> index;
  std::vector<double> weight;
};

Outcome<InterpolationWeights> interpolation_weights(const Bridge& bridge, const Vec& entry);

// Trajectory through the bridge from `entry` (on the start gate) with the
// bridge's entry velocity. Each step's acceleration is the fixed convex
// blend of the boundary accelerations.
Outcome<Trajectory> interpolate(const Bridge& bridge, const Vec& entry);

// Buffer region in front of the start gate in which any admissible arrival
// velocity is turned into the bridge's entry velocity.
struct Entrance {
  int dimension = 2;
  GateFrame frame;
  double v_max = 0.0;
  double a_max = 0.0;
  double flare = 0.0;        // lateral widening at the outer gate: sqrt(1/2) v^2 / a
  double depth = 0.0;        // sqrt(2/3) v^2 / a
  double line_length = 0.0;  // straight part of the boundary: depth - flare
  Vec v0;                    // the bridge's entry velocity
  // Gate cross-section in (side, side2) coordinates relative to frame.origin.
  std::vector<Vec> section;
  std::vector<Vec> gate_out;  // the bridge start gate
  std::vector<Vec> gate_in;   // outer gate, `depth` before gate_out
  TriangulatedStrip region_mesh;

  // Lateral allowance beyond the gate cross-section at forward coordinate x
  // (x = 0 on gate_out, -depth on gate_in).
  double allowance(double x) const;
  bool contains(const Vec& p, double eps = kGeomEps) const;
};

// Line length and worst-case turn time of an entrance.
double entrance_line_length(double v_max, double a_max);
double entrance_turn_time(double v_max, double a_max);

Outcome<Entrance> build_entrance(const Bridge& bridge, const AgentLimits& limits, const ObstacleSet& obstacles);

// Arrival states for which adjust_in_entrance stays inside the entrance:
// position in the region, speed <= v_max, non-negative forward component, and
// a lateral drift (at step dt) that ends inside the gate cross-section.
bool arrival_admissible(const Entrance& entrance, const State& arrival, double dt, double eps = 1e-9);

// Time for the velocity gaps to close under full acceleration.
double entrance_closing_time(const Entrance& entrance, const Vec& arrival_velocity);

// Steers an agent from `arrival` on gate_in to gate_out, ending with exactly
// the entry velocity. Phase 1 closes the forward and lateral velocity gaps
// together at full acceleration; the remaining run to gate_out follows the
// forward axis only, adjusting its pace so the last waypoint lands on the gate.
Outcome<Trajectory> adjust_in_entrance(const Entrance& entrance, const State& arrival, const AgentLimits& limits,
                                       double dt);

// True iff every waypoint, and every arc extremum between waypoints, lies in
// the entrance region.
bool entrance_contains(const Entrance& entrance, const Trajectory& traj);

}  // namespace bridgenav
