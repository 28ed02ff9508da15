#include "support.hpp"

#include <cmath>

namespace bridgenav::testing {

namespace {

Vec unit_ball(std::mt19937_64& rng, int dimension) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Vec v{u(rng), u(rng), dimension == 3 ? u(rng) : 0.0};
    if (norm(v) <= 1.0) return v;
  }
}

Vec clamp_norm(const Vec& v, double cap) {
  const double n = norm(v);
  return n > cap ? v * (cap / n) : v;
}

Bridge finish(Bridge b) {
  std::vector<std::vector<Vec>> outlines;
  b.start_gate.clear();
  b.end_gate.clear();
  for (const auto& t : b.boundaries) {
    b.start_gate.push_back(t.front().p);
    b.end_gate.push_back(t.back().p);
    outlines.push_back(t.positions());
  }
  b.strip = triangulate_boundary(outlines).value();
  b.frame.origin = b.start_center();
  return b;
}

GateFrame frame_for(const Vec& origin, const Vec& forward, int dimension) {
  GateFrame f;
  f.origin = origin;
  f.forward = forward;
  if (dimension == 2) {
    f.side = perp2(forward);
  } else {
    f.side = any_orthogonal(forward);
    f.side2 = cross(forward, f.side);
  }
  return f;
}

std::vector<Vec> directions(const GateFrame& f, int dimension) {
  if (dimension == 2) return {f.side, f.side * -1.0};
  std::vector<Vec> d;
  for (int k = 0; k < 6; ++k) {
    const double ang = 2.0 * M_PI * k / 6;
    d.push_back(f.side * std::cos(ang) + f.side2 * std::sin(ang));
  }
  return d;
}

}  // namespace

Bridge random_bridge(std::mt19937_64& rng, int dimension, const AgentLimits& limits, double dt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Bridge b;
  b.dimension = dimension;
  b.dt = dt;
  const Vec origin = unit_ball(rng, dimension) * 100.0;
  Vec fwd;
  while (norm(fwd) < 1e-3) fwd = unit_ball(rng, dimension);
  fwd = normalized(fwd);
  b.frame = frame_for(origin, fwd, dimension);
  b.v0 = fwd * limits.v_max;
  b.half_width = 0.5 + 10.0 * u(rng);
  const int steps = 20 + static_cast<int>(u(rng) * 180);
  for (const Vec& d : directions(b.frame, dimension)) {
    Trajectory t(dt);
    t.push({origin + d * b.half_width, b.v0, {}});
    for (int i = 0; i < steps; ++i) {
      const Vec v = t.back().v;
      const Vec want = v + unit_ball(rng, dimension) * (limits.a_max * dt);
      t.push_step((clamp_norm(want, limits.v_max) - v) / dt);
    }
    t.waypoints().back().a = {};
    b.boundaries.push_back(std::move(t));
  }
  return finish(std::move(b));
}

Vec random_gate_point(std::mt19937_64& rng, const Bridge& bridge) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& g = bridge.start_gate;
  if (bridge.dimension == 2) return g[0] + (g[1] - g[0]) * u(rng);
  const std::size_t k = 1 + static_cast<std::size_t>(u(rng) * (g.size() - 2));
  double s = u(rng), t = u(rng);
  if (s + t > 1.0) s = 1.0 - s, t = 1.0 - t;
  return g[0] + (g[k] - g[0]) * s + (g[k + 1] - g[0]) * t;
}

Bridge straight_bridge(const Vec& origin, double length, double hw, const AgentLimits& limits, double dt) {
  Bridge b;
  b.dimension = limits.dimension;
  b.dt = dt;
  b.frame = frame_for(origin, {1, 0, 0}, limits.dimension);
  b.v0 = Vec{limits.v_max, 0, 0};
  b.half_width = hw;
  const int steps = static_cast<int>(std::floor(length / (limits.v_max * dt)));
  for (const Vec& d : directions(b.frame, limits.dimension)) {
    Trajectory t(dt);
    t.push({origin + d * hw, b.v0, {}});
    for (int i = 0; i < steps; ++i) t.push_step({});
    b.boundaries.push_back(std::move(t));
  }
  return finish(std::move(b));
}

State random_admissible_arrival(std::mt19937_64& rng, const Entrance& e, double dt) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec base = e.frame.origin - e.frame.forward * e.depth;
  double reach = 0.0;
  for (const Vec& s : e.section) reach = std::max(reach, norm(s));
  reach += e.flare * 1.2;
  for (;;) {
    const Vec p = base + e.frame.side * (u(rng) * reach) + e.frame.side2 * (e.dimension == 3 ? u(rng) * reach : 0.0);
    Vec v = unit_ball(rng, e.dimension) * e.v_max;
    if (dot(v, e.frame.forward) < 0) v = v - e.frame.forward * (2.0 * dot(v, e.frame.forward));
    const State s{p, v};
    if (arrival_admissible(e, s, dt)) return s;
  }
}

}  // namespace bridgenav::testing
