#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bridgenav/sim.hpp"

namespace bridgenav {

// Scenario files are JSON documents:
//   {"name", "dimension", "bounds": {"lo", "hi"}, "dt", "seed", "tau",
//    "limits": {"radius", "v_max", "a_max"},
//    "obstacles": [{"polygon": [[x, y], ...]} |
//                  {"mesh": {"vertices": [[x, y, z], ...], "faces": [[i, j, k], ...]}} |
//                  {"box": {"lo", "hi"}}],
//    "agents": [{"start", "goal"}]}
// Points have `dimension` coordinates. Concave polygons are split into convex
// pieces; boxes become polygons (2D) or meshes (3D).
Outcome<Scenario> parse_scenario(std::string_view text);
Outcome<Scenario> load_scenario(const std::string& path);

// Parsing without the scenario invariants; used by `validate` to list every
// violation.
Outcome<Scenario> parse_scenario_unchecked(std::string_view text);

std::string serialize_scenario(const Scenario& s);

// Counter-clockwise convex pieces covering a simple polygon: ear clipping
// followed by greedy merging of adjacent pieces while they stay convex.
Outcome<std::vector<std::vector<Vec>>> convex_decomposition(std::span<const Vec> polygon);

// Convex mesh obstacle with faces reoriented outward. Fails when a vertex lies
// outside a face plane.
Outcome<Obstacle> convex_mesh(std::vector<Vec> vertices, std::vector<std::array<int, 3>> faces);

Obstacle box_obstacle(const Vec& lo, const Vec& hi, int dimension);

// One row per waypoint, sorted by (agent, step); step and t are global.
//   agent_id,step,t,px,py[,pz],vx,vy[,vz],ax,ay[,az],phase
void write_trajectory_log(std::ostream& out, const SimResult& result, int dimension);

std::string metrics_json(const Scenario& s, const SimResult& result);

// Top view (x, y) of obstacles, bridges, entrances and trajectories.
void write_svg(std::ostream& out, const Scenario& s, const SimResult& result);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace bridgenav
