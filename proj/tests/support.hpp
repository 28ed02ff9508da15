#pragma once

#include <random>

#include "bridgenav/bridge.hpp"

namespace bridgenav::testing {

// Bridge with random limit-satisfying boundaries in free space: K = 2 in 2D,
// K = 6 in 3D. Not collision-checked.
Bridge random_bridge(std::mt19937_64& rng, int dimension, const AgentLimits& limits, double dt);

// Uniform point on the start gate (segment or fan-triangulated polygon).
Vec random_gate_point(std::mt19937_64& rng, const Bridge& bridge);

// Straight, obstacle-free bridge of half-width hw along +x from origin.
Bridge straight_bridge(const Vec& origin, double length, double hw, const AgentLimits& limits, double dt);

// Arrival on gate_in accepted by arrival_admissible.
State random_admissible_arrival(std::mt19937_64& rng, const Entrance& entrance, double dt);

}  // namespace bridgenav::testing
