#include "bridgenav/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bridgenav {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;
constexpr double kSqrtTwoThirds = 0.81649658092772603273;

double chord_margin(const BridgeConfig& cfg, const AgentLimits& limits, double dt) {
  return cfg.chord_margin >= 0.0 ? cfg.chord_margin : limits.a_max * dt * dt / 8.0 + 1e-6;
}

std::vector<Vec> gate_directions(const GateFrame& f, int dimension, int k_points) {
  if (dimension == 2) return {f.side, f.side * -1.0};
  std::vector<Vec> dirs;
  for (int k = 0; k < k_points; ++k) {
    const double ang = 2.0 * M_PI * k / k_points;
    dirs.push_back(f.side * std::cos(ang) + f.side2 * std::sin(ang));
  }
  return dirs;
}

Vec centroid(const std::vector<Vec>& pts) {
  Vec c;
  for (const Vec& p : pts) c += p;
  return pts.empty() ? c : c / static_cast<double>(pts.size());
}

// Equalizes horizons, triangulates, and checks the swept region.
Outcome<Bridge> assemble(const std::vector<Trajectory>& raw, const Bridge& shape, const AgentLimits& limits,
                         const ObstacleSet& planning) {
  std::size_t horizon = 0;
  for (const auto& t : raw) horizon = std::max(horizon, t.horizon());
  Bridge b = shape;
  b.boundaries.clear();
  b.start_gate.clear();
  b.end_gate.clear();
  std::vector<std::vector<Vec>> outlines;
  for (const auto& t : raw) {
    auto fixed = enforce_boundary_conditions(t, b.v0, horizon, limits);
    if (!fixed) return fixed.error();
    b.start_gate.push_back(fixed->front().p);
    b.end_gate.push_back(fixed->back().p);
    outlines.push_back(fixed->positions());
    b.boundaries.push_back(std::move(*fixed));
  }
  auto strip = triangulate_boundary(outlines);
  if (!strip) return strip.error();
  if (strip_collides(*strip, planning)) return make_error(ErrorCode::kCollision, "bridge region meets an obstacle");
  b.strip = std::move(*strip);
  return b;
}

}  // namespace

Vec Bridge::start_center() const { return centroid(start_gate); }
Vec Bridge::end_center() const { return centroid(end_gate); }

Outcome<Bridge> construct_bridge(const Vec& p0, const Vec& pT, const ObstacleSet& obstacles,
                                 const AgentLimits& limits, double widen_step, const BridgeConfig& cfg) {
  if (!limits.valid() || (limits.dimension != 2 && limits.dimension != 3))
    return make_error(ErrorCode::kInvalidInput, "construct_bridge: bad limits");
  if (!(widen_step > 0.0) || !cfg.rrt.valid() || (limits.dimension == 3 && cfg.gate_points < 3))
    return make_error(ErrorCode::kInvalidInput, "construct_bridge: bad configuration");
  if (!is_finite(p0) || !is_finite(pT) || distance(p0, pT) <= kGeomEps)
    return make_error(ErrorCode::kDegenerate, "construct_bridge: start and end coincide");

  const double dt = cfg.rrt.dt;
  const ObstacleSet planning = obstacles.inflated_by(chord_margin(cfg, limits, dt));
  if (point_hits_obstacles(p0, planning) || point_hits_obstacles(pT, planning))
    return make_error(ErrorCode::kCollision, "construct_bridge: gate center inside an obstacle");

  Bridge shape;
  shape.dimension = limits.dimension;
  shape.dt = dt;
  shape.frame.origin = p0;
  shape.frame.forward = normalized(pT - p0);
  if (limits.dimension == 2) {
    shape.frame.side = perp2(shape.frame.forward);
  } else {
    shape.frame.side = any_orthogonal(shape.frame.forward);
    shape.frame.side2 = cross(shape.frame.forward, shape.frame.side);
  }
  shape.v0 = shape.frame.forward * limits.v_max;
  const std::vector<Vec> dirs = gate_directions(shape.frame, limits.dimension, cfg.gate_points);
  const int k_count = static_cast<int>(dirs.size());

  RrtConfig rrt = cfg.rrt;
  rrt.seed = mix_seed(cfg.rrt.seed, 0);
  auto seed_path = plan({p0, shape.v0}, {pT, {}}, planning, limits, rrt);
  if (!seed_path) return seed_path.error();

  auto best = assemble(std::vector<Trajectory>(k_count, *seed_path), shape, limits, planning);
  if (!best) return best.error();

  for (int w = 1; w <= cfg.max_widenings; ++w) {
    const double offset = w * widen_step;
    if (offset > cfg.max_half_width) break;
    std::vector<Trajectory> raw;
    bool blocked = false;
    for (int k = 0; k < k_count && !blocked; ++k) {
      const Vec s = p0 + dirs[k] * offset;
      const Vec g = pT + dirs[k] * offset;
      if (!cfg.rrt.bounds.contains(s) || !cfg.rrt.bounds.contains(g) || point_hits_obstacles(s, planning) ||
          point_hits_obstacles(g, planning)) {
        blocked = true;
        break;
      }
      rrt.seed = mix_seed(cfg.rrt.seed, static_cast<std::uint64_t>(w * k_count + k + 1));
      auto path = plan({s, shape.v0}, {g, {}}, planning, limits, rrt);
      if (!path) {
        best->truncated = true;
        blocked = true;
        break;
      }
      raw.push_back(std::move(*path));
    }
    if (blocked) break;
    auto candidate = assemble(raw, shape, limits, planning);
    if (!candidate) break;
    candidate->half_width = offset;
    candidate->widenings = w;
    best = std::move(candidate);
  }
  best->frame.origin = best->start_center();
  return best;
}

// ---------------------------------------------------------------------------
// Interpolation

Outcome<InterpolationWeights> interpolation_weights(const Bridge& bridge, const Vec& entry) {
  if (bridge.start_gate.empty()) return make_error(ErrorCode::kInvalidInput, "interpolate: empty bridge");
  const double tol = kGeomEps * std::max(1.0, inf_norm(entry));
  InterpolationWeights w;

  if (bridge.dimension == 2) {
    const Vec& u = bridge.start_gate[0];
    const Vec& l = bridge.start_gate[1];
    const Vec ul = l - u;
    const double len2 = dot(ul, ul);
    if (len2 <= tol * tol) {
      if (distance(entry, u) > tol) return make_error(ErrorCode::kInvalidInput, "interpolate: entry point off the gate");
      w.index = {0, 1};
      w.weight = {1.0, 0.0};
      return w;
    }
    const double len = std::sqrt(len2);
    const double along = dot(entry - u, ul) / len;
    const double across = norm(entry - (u + ul * (along / len)));
    if (across > tol || along < -tol || along > len + tol)
      return make_error(ErrorCode::kInvalidInput, "interpolate: entry point off the gate");
    // r = |p0^u p0| / |p0^u p0^l|
    const double r = std::clamp(along / len, 0.0, 1.0);
    w.index = {0, 1};
    w.weight = {1.0 - r, r};
    return w;
  }

  const Vec c = bridge.start_center();
  const Vec& n = bridge.frame.forward;
  if (std::fabs(dot(entry - c, n)) > tol)
    return make_error(ErrorCode::kInvalidInput,
                      "interpolate: entry point " + std::to_string(std::fabs(dot(entry - c, n))) + " off the gate plane");
  const Vec q = entry - n * dot(entry - c, n);
  if (bridge.half_width <= tol) {
    if (distance(q, c) > tol)
      return make_error(ErrorCode::kInvalidInput,
                        "interpolate: entry point " + std::to_string(distance(q, c)) + " from a point gate");
    w.index = {0};
    w.weight = {1.0};
    return w;
  }
  const auto& g = bridge.start_gate;
  const double rel = tol / bridge.half_width;
  for (std::size_t k = 1; k + 1 < g.size(); ++k) {
    auto bc = barycentric(g[0], g[k], g[k + 1], q);
    if (!bc) continue;
    auto [a, b, d] = *bc;
    if (a < -rel || b < -rel || d < -rel) continue;
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
    d = std::max(d, 0.0);
    const double sum = a + b + d;
    w.index = {0, static_cast<int>(k), static_cast<int>(k + 1)};
    w.weight = {a / sum, b / sum, d / sum};
    return w;
  }
  return make_error(ErrorCode::kInvalidInput, "interpolate: no gate triangle contains the entry point");
}

Outcome<Trajectory> interpolate(const Bridge& bridge, const Vec& entry) {
  auto w = interpolation_weights(bridge, entry);
  if (!w) return w.error();
  const std::size_t horizon = bridge.horizon();
  Vec p;
  for (std::size_t j = 0; j < w->index.size(); ++j) p += bridge.start_gate[w->index[j]] * w->weight[j];
  Trajectory out(bridge.dt);
  out.waypoints().reserve(horizon + 1);
  out.push({p, bridge.v0, {}});
  for (std::size_t i = 0; i < horizon; ++i) {
    Vec a;
    for (std::size_t j = 0; j < w->index.size(); ++j) a += bridge.boundaries[w->index[j]][i].a * w->weight[j];
    out.push_step(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entrance

double entrance_line_length(double v_max, double a_max) {
  return (kSqrtTwoThirds - kSqrtHalf) * v_max * v_max / a_max;
}

double entrance_turn_time(double v_max, double a_max) { return std::sqrt(2.0) * v_max / a_max; }

double Entrance::allowance(double x) const {
  const double s = x + depth;
  if (s <= 0.0) return flare;
  if (s >= flare) return 0.0;
  // Parabola traced by a turn at a_max along (x + y) / sqrt(2).
  const double t = std::sqrt(2.0 * std::sqrt(2.0) * s / a_max);
  return std::max(0.0, flare - v_max * t + s);
}

namespace {

Vec lateral(const GateFrame& f, const Vec& p) {
  const Vec d = p - f.origin;
  return {dot(d, f.side), dot(d, f.side2), 0.0};
}

double section_distance(const std::vector<Vec>& section, const Vec& q, int dimension) {
  if (dimension == 2) {
    const double lo = std::min(section[0].x, section[1].x);
    const double hi = std::max(section[0].x, section[1].x);
    return std::max({0.0, lo - q.x, q.x - hi});
  }
  if (section.size() == 1) return distance(section[0], q);
  const Vec pt[1] = {q};
  return convex_distance(pt, section);
}

}  // namespace

bool Entrance::contains(const Vec& p, double eps) const {
  const double x = dot(p - frame.origin, frame.forward);
  if (x < -depth - eps || x > eps) return false;
  const double d = section_distance(section, lateral(frame, p), dimension);
  return d <= allowance(std::clamp(x, -depth, 0.0)) + eps;
}

Outcome<Entrance> build_entrance(const Bridge& bridge, const AgentLimits& limits, const ObstacleSet& obstacles) {
  if (bridge.start_gate.empty() || !limits.valid())
    return make_error(ErrorCode::kInvalidInput, "build_entrance: bad bridge or limits");
  Entrance e;
  e.dimension = bridge.dimension;
  e.frame = bridge.frame;
  e.frame.origin = bridge.start_center();
  e.v_max = limits.v_max;
  e.a_max = limits.a_max;
  e.v0 = bridge.v0;
  const double scale = limits.v_max * limits.v_max / limits.a_max;
  e.flare = kSqrtHalf * scale;
  e.depth = kSqrtTwoThirds * scale;
  e.line_length = entrance_line_length(limits.v_max, limits.a_max);
  e.gate_out = bridge.start_gate;
  for (const Vec& g : bridge.start_gate) e.section.push_back(lateral(e.frame, g));

  const Vec& fwd = e.frame.forward;
  const int k_count = static_cast<int>(bridge.start_gate.size());
  // Outward direction and miter factor per gate point.
  std::vector<Vec> outward;
  double miter = 1.0;
  if (e.dimension == 2) {
    outward = {e.frame.side, e.frame.side * -1.0};
  } else {
    outward = gate_directions(e.frame, 3, k_count);
    miter = 1.0 / std::cos(M_PI / k_count);
  }
  const Vec in_shift = fwd * -e.depth;
  for (int k = 0; k < k_count; ++k) e.gate_in.push_back(bridge.start_gate[k] + in_shift + outward[k] * (e.flare * miter));

  // Boundary profiles: parabola samples, then the straight run to gate_out.
  // Chords of the convex profile lie outside the region, so the mesh covers it.
  constexpr int kSamples = 16;
  const double turn = entrance_turn_time(limits.v_max, limits.a_max);
  const double ax = limits.a_max * kSqrtHalf;
  std::vector<double> xs, ws;
  for (int j = 0; j <= kSamples; ++j) {
    const double t = turn * j / kSamples;
    const double s = 0.5 * ax * t * t;
    xs.push_back(-e.depth + s);
    ws.push_back(std::max(0.0, e.flare - limits.v_max * t + s));
  }
  xs.push_back(0.0);
  ws.push_back(0.0);
  std::vector<std::vector<Vec>> outlines(k_count);
  for (int k = 0; k < k_count; ++k) {
    for (std::size_t j = 0; j < xs.size(); ++j)
      outlines[k].push_back(bridge.start_gate[k] + fwd * xs[j] + outward[k] * (ws[j] * miter));
  }
  auto mesh = triangulate_boundary(outlines);
  if (!mesh) return mesh.error();
  e.region_mesh = std::move(*mesh);
  const ObstacleSet planning = obstacles.inflated_by(limits.a_max * bridge.dt * bridge.dt / 8.0 + 1e-6);
  if (strip_collides(e.region_mesh, planning))
    return make_error(ErrorCode::kCollision, "build_entrance: entrance region meets an obstacle");
  return e;
}

double entrance_closing_time(const Entrance& entrance, const Vec& arrival_velocity) {
  const double vx = dot(arrival_velocity, entrance.frame.forward);
  const Vec vperp = arrival_velocity - entrance.frame.forward * vx;
  return std::sqrt((entrance.v_max - vx) * (entrance.v_max - vx) + dot(vperp, vperp)) / entrance.a_max;
}

namespace {

int closing_steps(double t, double dt) {
  return t <= 0.0 ? 0 : static_cast<int>(std::ceil(t / dt - 1e-9));
}

}  // namespace

bool arrival_admissible(const Entrance& entrance, const State& arrival, double dt, double eps) {
  if (!entrance.contains(arrival.p, eps)) return false;
  if (norm(arrival.v) > entrance.v_max * (1.0 + kDynEps)) return false;
  const Vec& fwd = entrance.frame.forward;
  const double vx = dot(arrival.v, fwd);
  if (vx < -eps) return false;
  const double t = closing_steps(entrance_closing_time(entrance, arrival.v), dt) * dt;
  const Vec drift = (arrival.v - fwd * vx) * (0.5 * t);
  const Vec end = arrival.p + drift + fwd * (0.5 * (vx + entrance.v_max) * t);
  if (dot(end - entrance.frame.origin, fwd) > eps) return false;
  if (section_distance(entrance.section, lateral(entrance.frame, end), entrance.dimension) > eps) return false;
  // Extreme positions of the continuous full-acceleration turn.
  const Vec gap = entrance.v0 - arrival.v;
  const double closing = norm(gap) / entrance.a_max;
  if (closing <= 0.0) return true;
  const Vec a = gap / closing;
  constexpr int kSamples = 256;
  for (int k = 1; k <= kSamples; ++k) {
    const double tk = closing * k / kSamples;
    if (!entrance.contains(arrival.p + arrival.v * tk + a * (0.5 * tk * tk), eps)) return false;
  }
  return true;
}

Outcome<Trajectory> adjust_in_entrance(const Entrance& entrance, const State& arrival, const AgentLimits& limits,
                                       double dt) {
  if (!(dt > 0.0)) return make_error(ErrorCode::kInvalidInput, "adjust_in_entrance: bad dt");
  if (norm(arrival.v) > limits.v_max * (1.0 + kDynEps))
    return make_error(ErrorCode::kUnreachable, "adjust_in_entrance: arrival speed exceeds v_max");
  if (!entrance.contains(arrival.p, 1e-7 * (1.0 + inf_norm(arrival.p))))
    return make_error(ErrorCode::kInvalidInput, "adjust_in_entrance: arrival outside the entrance");

  const Vec& fwd = entrance.frame.forward;
  const double v = entrance.v_max;
  const double a_max = limits.a_max;
  const double vx = dot(arrival.v, fwd);
  const Vec vperp = arrival.v - fwd * vx;
  const double run = -dot(arrival.p - entrance.frame.origin, fwd);
  const double tol = 1e-9 * (1.0 + inf_norm(arrival.p));

  // Phase 1 lasts until the lateral velocity is gone; its acceleration is
  // parallel to the velocity gap, so the forward gap closes at the same time.
  // When the step grid would then overshoot gate_out, the forward speed at
  // the end of phase 1 (u) is lowered instead, and phase 2 picks it up.
  const int n1 = closing_steps(norm(entrance.v0 - arrival.v) / a_max, dt);
  const double span1 = n1 * dt;
  const Vec a_lat = n1 > 0 ? vperp * (-1.0 / span1) : Vec{};
  const double a_fwd = std::sqrt(std::max(0.0, a_max * a_max - dot(a_lat, a_lat)));
  const double u_floor = n1 > 0 ? std::max(0.0, vx - a_fwd * span1) : v;
  auto phase1 = [&](double u) { return 0.5 * (vx + u) * span1; };
  auto longest = [&](double u, int m) {
    auto r = axis_reach(u, v, a_max, v, m, dt);
    return r ? phase1(u) + r->second : -1.0;
  };

  int m = 0;
  while (longest(v, m) < run - tol) {
    if (++m > 1000000) return make_error(ErrorCode::kInfeasible, "adjust_in_entrance: cannot reach the gate");
  }
  if (phase1(v) > run + tol)
    return make_error(ErrorCode::kInfeasible, "adjust_in_entrance: velocity adjustment overshoots the gate");

  double u = v;
  std::optional<std::vector<double>> pace;
  const double lowest = std::max(u_floor, v - a_max * m * dt);
  if (longest(v, m) > run + tol && n1 > 0 && longest(lowest, m) <= run) {
    double lo = lowest, hi = v;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * v; ++it) {
      const double mid = 0.5 * (lo + hi);
      (longest(mid, m) < run ? lo : hi) = mid;
    }
    u = hi;
    pace = axis_profile(run - phase1(u), u, v, a_max, v, m, dt);
  }
  if (!pace) {
    u = v;
    for (int k = m; k < m + 100000 && !pace; ++k) pace = axis_profile(run - phase1(v), v, v, a_max, v, k, dt);
  }
  if (!pace) return make_error(ErrorCode::kInfeasible, "adjust_in_entrance: cannot land on the gate");

  Trajectory out(dt);
  out.push({arrival.p, arrival.v, {}});
  if (n1 > 0) {
    const Vec a = a_lat + fwd * ((u - vx) / span1);
    for (int i = 0; i < n1; ++i) out.push_step(a);
    out.waypoints().back().v = fwd * u;
  }
  for (std::size_t i = 0; i + 1 < pace->size(); ++i) {
    out.push_step(fwd * (((*pace)[i + 1] - (*pace)[i]) / dt));
    out.waypoints().back().v = fwd * (*pace)[i + 1];
  }
  out.waypoints().back().v = entrance.v0;
  out.waypoints().back().a = {};
  return out;
}

bool entrance_contains(const Entrance& entrance, const Trajectory& traj) {
  const double eps = 1e-7;
  const double dt = traj.dt();
  const Vec axes[3] = {entrance.frame.forward, entrance.frame.side, entrance.frame.side2};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Waypoint& w = traj[i];
    if (!entrance.contains(w.p, eps)) return false;
    if (i + 1 == traj.size()) break;
    for (const Vec& axis : axes) {
      const double ac = dot(w.a, axis);
      if (ac == 0.0) continue;
      const double tau = -dot(w.v, axis) / ac;
      if (tau <= 0.0 || tau >= dt) continue;
      const Vec apex = w.p + w.v * tau + w.a * (0.5 * tau * tau);
      if (!entrance.contains(apex, eps)) return false;
    }
  }
  return true;
}

}  // namespace bridgenav
