#include "bridgenav/reach.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

namespace bridgenav {

bool ReachRegion::valid(int dimension) const {
  const std::size_t need = dimension == 3 ? 3 : (dimension == 2 ? 2 : 1);
  if (anchors.size() < need || !(tau > 0.0) || !std::isfinite(tau)) return false;
  return std::all_of(anchors.begin(), anchors.end(), [](const Vec& a) { return is_finite(a); });
}

double linf_distance_to_hull(std::span<const Vec> hull, const Vec& q) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const Vec& h : hull) hi = std::min(hi, inf_norm(h - q));
  if (hi == 0.0) return 0.0;
  const double nearest_vertex = hi;
  // The cube of half-size t around q meets the hull iff t >= answer.
  std::array<Vec, 8> cube;
  double lo = 0.0;
  const double tol = 1e-13 * (1.0 + hi + inf_norm(q));
  while (hi - lo > tol) {
    const double t = 0.5 * (lo + hi);
    for (int c = 0; c < 8; ++c) {
      cube[c] = q + Vec{(c & 1) ? t : -t, (c & 2) ? t : -t, (c & 4) ? t : -t};
    }
    if (convex_distance(cube, hull) <= tol) {
      hi = t;
    } else {
      lo = t;
    }
  }
  // Within tolerance of a vertex distance: keep the exact value.
  return nearest_vertex - hi <= 4.0 * tol ? nearest_vertex : hi;
}

double region_travel_time(const ReachRegion& region, const Vec& q, const AgentLimits& limits) {
  return axis_rest_to_rest_time(linf_distance_to_hull(region.anchors, q), limits);
}

bool region_contains(const ReachRegion& region, const Vec& q, const AgentLimits& limits) {
  return region_travel_time(region, q, limits) < region.tau;
}

double default_tau(const Aabb& bounds, const AgentLimits& limits) {
  const double diameter = bounds.empty() ? 0.0 : norm(bounds.hi - bounds.lo);
  return diameter / limits.v_max + 2.0 * limits.v_max / limits.a_max;
}

namespace {

Vec point_at_arc(const std::vector<Vec>& pts, const std::vector<double>& arc, double s) {
  if (s <= 0.0) return pts.front();
  if (s >= arc.back()) return pts.back();
  const auto it = std::upper_bound(arc.begin(), arc.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - arc.begin());
  const double span = arc[i] - arc[i - 1];
  const double f = span > 0.0 ? (s - arc[i - 1]) / span : 0.0;
  return pts[i - 1] + (pts[i] - pts[i - 1]) * f;
}

double resolved(double value, double fallback) { return value > 0.0 ? value : fallback; }

std::string fmt(const Vec& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%g, %g, %g)", v.x, v.y, v.z);
  return buf;
}

}  // namespace

Outcome<BridgePlacement> place_bridge(const Vec& start, const Vec& goal, const ObstacleSet& obstacles,
                                          const AgentLimits& limits, const AssignConfig& cfg, double backoff,
                                          std::uint64_t seed) {
  if (distance(start, goal) <= kGeomEps) return make_error(ErrorCode::kDegenerate, "place_bridge: start and goal coincide");
  const RrtConfig& rrt = cfg.bridge.rrt;
  auto path = geometric_path(start, goal, obstacles, rrt.bounds, limits.dimension, 0.5 * limits.radius,
                             rrt.max_iterations, seed);
  if (!path) return path.error();
  // Densify so narrow stretches are seen between long free segments.
  std::vector<Vec> pts{path->front()};
  for (std::size_t i = 1; i < path->size(); ++i) {
    const Vec a = (*path)[i - 1], b = (*path)[i];
    const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / (0.25 * limits.radius))));
    for (int k = 1; k <= n; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
  }

  std::vector<double> arc(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) arc[i] = arc[i - 1] + distance(pts[i - 1], pts[i]);

  const double narrow = resolved(cfg.narrow_clearance, limits.radius);
  double first = -1.0, last = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (clearance(pts[i], obstacles) < narrow) {
      if (first < 0.0) first = arc[i];
      last = arc[i];
    }
  }
  if (first < 0.0) first = last = 0.5 * arc.back();
  BridgePlacement out;
  out.start = point_at_arc(pts, arc, first - backoff);
  out.end = point_at_arc(pts, arc, last + backoff);
  if (distance(out.start, out.end) <= kGeomEps) return make_error(ErrorCode::kDegenerate, "place_bridge: gates coincide");
  out.region.extend(out.start);
  out.region.extend(out.end);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (arc[i] > first - backoff && arc[i] < last + backoff) out.region.extend(pts[i]);
  }
  const double pad = limits.v_max * limits.v_max / limits.a_max + limits.radius;
  out.region = out.region.inflated(pad);
  const Aabb& world = rrt.bounds;
  out.region.lo = {std::max(out.region.lo.x, world.lo.x), std::max(out.region.lo.y, world.lo.y),
                   std::max(out.region.lo.z, world.lo.z)};
  out.region.hi = {std::min(out.region.hi.x, world.hi.x), std::min(out.region.hi.y, world.hi.y),
                   std::min(out.region.hi.z, world.hi.z)};
  return out;
}

Outcome<Assignment> assign_bridges(std::span<const AgentTask> agents, const ObstacleSet& obstacles,
                                   const AgentLimits& limits, const AssignConfig& cfg, const AssignFilter& filter) {
  if (agents.empty()) return make_error(ErrorCode::kInvalidInput, "assign_bridges: no agents");
  if (!limits.valid() || cfg.placement_attempts < 1)
    return make_error(ErrorCode::kInvalidInput, "assign_bridges: bad limits or configuration");

  const double tau = resolved(cfg.tau, default_tau(cfg.bridge.rrt.bounds, limits));
  const double widen = resolved(cfg.widen_step, 0.5 * limits.radius);
  const double scale = limits.v_max * limits.v_max / limits.a_max;
  // Entrance depth plus flare, plus one radius of room.
  const double base_backoff = (std::sqrt(2.0 / 3.0) + std::sqrt(0.5)) * scale + limits.radius;

  Assignment out;
  out.bridge_of.assign(agents.size(), -1);
  const auto covers = [&](std::size_t j, const BridgeSite& site) {
    return region_contains(site.backward, agents[j].start, limits) &&
           region_contains(site.forward, agents[j].goal, limits) &&
           (!filter || filter(static_cast<int>(j), static_cast<int>(out.sites.size()), site));
  };

  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (out.bridge_of[i] >= 0) continue;
    std::optional<BridgeSite> made;
    Error last{ErrorCode::kUnreachable, "no attempt"};
    for (int a = 0; a < cfg.placement_attempts && !made; ++a) {
      const std::uint64_t seed = mix_seed(cfg.bridge.rrt.seed, out.sites.size() * 1024 + static_cast<std::uint64_t>(a));
      const double backoff = base_backoff * (1.0 + 0.5 * a);
      auto gates = place_bridge(agents[i].start, agents[i].goal, obstacles, limits, cfg, backoff, seed);
      if (!gates) {
        last = gates.error();
        continue;
      }
      BridgeConfig bcfg = cfg.bridge;
      bcfg.rrt.seed = mix_seed(seed, 1);
      bcfg.rrt.bounds = gates->region;
      auto bridge = construct_bridge(gates->start, gates->end, obstacles, limits, widen, bcfg);
      if (!bridge) {
        last = bridge.error();
        continue;
      }
      auto entrance = build_entrance(*bridge, limits, obstacles);
      if (!entrance) {
        last = entrance.error();
        continue;
      }
      BridgeSite site;
      site.backward = {entrance->gate_in, tau, ReachDirection::kBackward};
      site.forward = {bridge->end_gate, tau, ReachDirection::kForward};
      site.bridge = std::move(*bridge);
      site.entrance = std::move(*entrance);
      site.seed_agent = static_cast<int>(i);
      if (!covers(i, site)) {
        last = {ErrorCode::kUnreachable, "seed agent not served by its own bridge"};
        continue;
      }
      made = std::move(site);
    }
    if (!made) {
      return make_error(last.code, "assign_bridges: agent " + std::to_string(i) + " (start " + fmt(agents[i].start) +
                                       ", goal " + fmt(agents[i].goal) + "): " + last.message);
    }
    const int id = static_cast<int>(out.sites.size());
    out.bridge_of[i] = id;
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      if (out.bridge_of[j] < 0 && covers(j, *made)) out.bridge_of[j] = id;
    }
    out.sites.push_back(std::move(*made));
  }
  return out;
}

}  // namespace bridgenav
