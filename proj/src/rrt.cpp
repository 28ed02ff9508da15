#include "bridgenav/rrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace bridgenav {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool RrtConfig::valid() const {
  return max_iterations > 0 && goal_bias >= 0.0 && goal_bias <= 1.0 && steer_duration > 0.0 && dt > 0.0 &&
         goal_position_tol > 0.0 && goal_velocity_tol > 0.0 && !bounds.empty() && steer_candidates > 0;
}

bool trajectory_hits_obstacles(const Trajectory& t, const ObstacleSet& obstacles) {
  if (t.empty() || obstacles.empty()) return false;
  if (t.size() == 1) return point_hits_obstacles(t.front().p, obstacles);
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (segment_hits_obstacles(t[i].p, t[i + 1].p, obstacles)) return true;
  return false;
}

bool trajectory_hits_obstacles_dense(const Trajectory& t, const ObstacleSet& obstacles, int substeps) {
  if (t.empty() || obstacles.empty()) return false;
  if (t.size() == 1) return point_hits_obstacles(t.front().p, obstacles);
  const double h = t.dt() / substeps;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const Waypoint& w = t[i];
    Vec prev = w.p;
    for (int s = 1; s <= substeps; ++s) {
      const double tau = s * h;
      const Vec p = s == substeps ? t[i + 1].p : w.p + w.v * tau + w.a * (0.5 * tau * tau);
      if (segment_hits_obstacles(prev, p, obstacles)) return true;
      prev = p;
    }
  }
  return false;
}

namespace {

class Sampler {
 public:
  Sampler(std::uint64_t seed, int dim) : rng_(seed), dim_(dim) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec in_box(const Aabb& box) {
    Vec p;
    for (int k = 0; k < dim_; ++k) p[k] = uniform(box.lo[k], box.hi[k]);
    return p;
  }

  Vec in_ball(double radius) {
    for (;;) {
      Vec p;
      for (int k = 0; k < dim_; ++k) p[k] = uniform(-1.0, 1.0);
      if (squared_norm(p) <= 1.0) return p * radius;
    }
  }

 private:
  std::mt19937_64 rng_;
  int dim_;
};

double state_metric(const State& a, const State& b, double vel_weight) {
  return squared_norm(a.p - b.p) + vel_weight * vel_weight * squared_norm(a.v - b.v);
}

// Integrates `steps` steps of constant control, clamping velocity to the
// v_max ball by shortening the per-step acceleration.
std::vector<Waypoint> rollout(const State& from, const Vec& accel, int steps, double dt, double v_max) {
  std::vector<Waypoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back({from.p, from.v, {}});
  for (int i = 0; i < steps; ++i) {
    const Waypoint& w = out.back();
    Vec v_next = w.v + accel * dt;
    const double speed = norm(v_next);
    if (speed > v_max) v_next = v_next * (v_max / speed);
    const Vec a = (v_next - w.v) / dt;
    out.back().a = a;
    const State s = integrate_step({w.p, w.v}, a, dt);
    out.push_back({s.p, s.v, {}});
  }
  return out;
}

bool edge_clear(const std::vector<Waypoint>& edge, const ObstacleSet& obstacles, const Aabb& bounds) {
  for (std::size_t i = 0; i + 1 < edge.size(); ++i) {
    if (!bounds.contains(edge[i + 1].p)) return false;
    if (segment_hits_obstacles(edge[i].p, edge[i + 1].p, obstacles)) return false;
  }
  return true;
}

Trajectory assemble(const std::vector<RrtNode>& nodes, int leaf, double dt) {
  std::vector<int> chain;
  for (int n = leaf; n >= 0; n = nodes[n].parent) chain.push_back(n);
  Trajectory out(dt);
  out.push({nodes[0].state.p, nodes[0].state.v, {}});
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const RrtNode& node = nodes[*it];
    if (node.parent < 0) continue;
    out.append(Trajectory(dt, node.edge));
  }
  return out;
}

}  // namespace

Outcome<Trajectory> plan(const State& start, const State& goal, const ObstacleSet& obstacles,
                         const AgentLimits& limits, const RrtConfig& cfg, RrtStats* stats) {
  if (!cfg.valid() || !limits.valid()) return make_error(ErrorCode::kInvalidInput, "rrt: invalid configuration");
  if (point_hits_obstacles(start.p, obstacles)) return make_error(ErrorCode::kInvalidInput, "rrt: start in collision");

  const double dt = cfg.dt;
  const int dim = limits.dimension;
  const auto within_goal = [&](const State& s) {
    return distance(s.p, goal.p) <= cfg.goal_position_tol && distance(s.v, goal.v) <= cfg.goal_velocity_tol;
  };
  if (distance(start.p, goal.p) <= kGeomEps && distance(start.v, goal.v) <= kGeomEps)
    return Trajectory(dt, {{start.p, start.v, {}}});

  const int steer_steps = std::max(1, static_cast<int>(std::lround(cfg.steer_duration / dt)));
  const double vel_weight = limits.v_max / limits.a_max;
  Sampler sampler(cfg.seed, dim);

  std::vector<RrtNode> nodes;
  nodes.push_back({start, -1, {}, {}});
  RrtStats local;

  const auto try_connect = [&](int from) -> Outcome<Trajectory> {
    ++local.connect_attempts;
    auto link = optimal_connect(nodes[from].state, goal, limits, dt);
    if (!link) return link.error();
    if (trajectory_hits_obstacles(*link, obstacles)) return make_error(ErrorCode::kCollision, "");
    for (const Waypoint& w : link->waypoints())
      if (!cfg.bounds.contains(w.p)) return make_error(ErrorCode::kCollision, "");
    Trajectory path = assemble(nodes, from, dt);
    path.append(*link);
    return path;
  };

  auto finish = [&](Outcome<Trajectory> result) {
    local.nodes = static_cast<int>(nodes.size());
    if (stats) *stats = local;
    return result;
  };

  if (auto direct = try_connect(0)) return finish(std::move(direct));

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    local.iterations = iter + 1;
    if (sampler.uniform(0.0, 1.0) < cfg.goal_bias) {
      if (auto path = try_connect(static_cast<int>(nodes.size()) - 1)) return finish(std::move(path));
      continue;
    }
    const State target{sampler.in_box(cfg.bounds), sampler.in_ball(limits.v_max)};

    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = state_metric(nodes[i].state, target, vel_weight);
      if (d < best) {
        best = d;
        nearest = static_cast<int>(i);
      }
    }

    std::vector<Waypoint> best_edge;
    Vec best_accel;
    double best_score = std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.steer_candidates; ++c) {
      const Vec accel = sampler.in_ball(limits.a_max);
      auto edge = rollout(nodes[nearest].state, accel, steer_steps, dt, limits.v_max);
      const double score = state_metric({edge.back().p, edge.back().v}, target, vel_weight);
      if (score < best_score) {
        best_score = score;
        best_edge = std::move(edge);
        best_accel = accel;
      }
    }
    if (!edge_clear(best_edge, obstacles, cfg.bounds)) continue;

    const State reached{best_edge.back().p, best_edge.back().v};
    nodes.push_back({reached, nearest, best_accel, std::move(best_edge)});
    if (within_goal(reached)) return finish(assemble(nodes, static_cast<int>(nodes.size()) - 1, dt));
  }
  return finish(make_error(ErrorCode::kBudgetExhausted, "rrt: iteration budget exhausted"));
}

Outcome<Trajectory> enforce_boundary_conditions(const Trajectory& traj, const Vec& v0, std::size_t horizon,
                                                const AgentLimits& limits) {
  if (traj.empty()) return make_error(ErrorCode::kInvalidInput, "enforce_boundary_conditions: empty trajectory");
  const double dt = traj.dt();
  Trajectory out(dt);

  if (distance(traj.front().v, v0) <= 1e-12 * (1.0 + norm(v0))) {
    out = traj;
  } else {
    const State head{traj.front().p, v0};
    const double slack = limits.v_max / limits.a_max;
    std::optional<Trajectory> fallback;
    std::size_t fallback_index = 0;
    for (std::size_t j = 1; j < traj.size(); ++j) {
      auto link = optimal_connect(head, {traj[j].p, traj[j].v}, limits, dt);
      if (!link) continue;
      fallback = *link;
      fallback_index = j;
      if (link->duration() <= static_cast<double>(j) * dt + slack) break;
    }
    if (!fallback) return make_error(ErrorCode::kInfeasible, "enforce_boundary_conditions: no feasible prefix splice");
    out = *fallback;
    out.append(Trajectory(dt, {traj.waypoints().begin() + static_cast<long>(fallback_index), traj.waypoints().end()}));
  }
  out.waypoints().front().v = v0;

  if (out.size() > horizon + 1)
    return make_error(ErrorCode::kInfeasible, "enforce_boundary_conditions: trajectory longer than horizon");
  if (out.size() < horizon + 1) {
    if (norm(out.back().v) > kDynEps * limits.v_max)
      return make_error(ErrorCode::kInfeasible, "enforce_boundary_conditions: cannot pad a moving terminal state");
    Waypoint rest{out.back().p, {}, {}};
    out.waypoints().back().v = {};
    out.waypoints().back().a = {};
    while (out.size() < horizon + 1) out.push(rest);
  }
  return out;
}

Outcome<std::vector<Vec>> geometric_path(const Vec& start, const Vec& goal, const ObstacleSet& obstacles,
                                         const Aabb& bounds, int dimension, double step, int max_iterations,
                                         std::uint64_t seed) {
  if (!(step > 0.0) || max_iterations < 1 || bounds.empty())
    return make_error(ErrorCode::kInvalidInput, "geometric_path: bad configuration");
  if (point_hits_obstacles(start, obstacles) || point_hits_obstacles(goal, obstacles))
    return make_error(ErrorCode::kCollision, "geometric_path: endpoint in collision");
  if (!segment_hits_obstacles(start, goal, obstacles)) return std::vector<Vec>{start, goal};

  struct Tree {
    std::vector<Vec> pts;
    std::vector<int> parent;
    int nearest(const Vec& q) const {
      int best = 0;
      double d = squared_norm(pts[0] - q);
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const double e = squared_norm(pts[i] - q);
        if (e < d) {
          d = e;
          best = static_cast<int>(i);
        }
      }
      return best;
    }
    // Steps from the nearest node toward q until q is reached or blocked;
    // returns the last node added (or -1).
    int grow(const Vec& q, const ObstacleSet& obstacles, double step, bool greedy) {
      int at = nearest(q);
      int added = -1;
      while (true) {
        const Vec from = pts[static_cast<std::size_t>(at)];
        const double d = distance(from, q);
        if (d <= kGeomEps) return added >= 0 ? added : at;
        const Vec to = d <= step ? q : from + (q - from) * (step / d);
        if (segment_hits_obstacles(from, to, obstacles)) return added;
        pts.push_back(to);
        parent.push_back(at);
        at = added = static_cast<int>(pts.size()) - 1;
        if (!greedy || to == q) return added;
      }
    }
    std::vector<Vec> branch(int i) const {
      std::vector<Vec> out;
      for (; i >= 0; i = parent[static_cast<std::size_t>(i)]) out.push_back(pts[static_cast<std::size_t>(i)]);
      return out;
    }
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tree a{{start}, {-1}}, b{{goal}, {-1}};
  bool a_is_start = true;
  for (int it = 0; it < max_iterations; ++it) {
    Vec q;
    for (int k = 0; k < dimension; ++k) q[k] = bounds.lo[k] + (bounds.hi[k] - bounds.lo[k]) * u(rng);
    const int na = a.grow(q, obstacles, step, false);
    if (na >= 0) {
      const Vec target = a.pts[static_cast<std::size_t>(na)];
      const int nb = b.grow(target, obstacles, step, true);
      if (nb >= 0 && b.pts[static_cast<std::size_t>(nb)] == target) {
        std::vector<Vec> head = a.branch(na), tail = b.branch(nb);
        std::reverse(head.begin(), head.end());
        head.insert(head.end(), tail.begin() + 1, tail.end());
        if (!a_is_start) std::reverse(head.begin(), head.end());
        std::vector<Vec> out{head.front()};
        for (std::size_t i = 0; i + 1 < head.size();) {
          std::size_t j = head.size() - 1;
          while (j > i + 1 && segment_hits_obstacles(head[i], head[j], obstacles)) --j;
          out.push_back(head[j]);
          i = j;
        }
        return out;
      }
    }
    if (a.pts.size() > b.pts.size()) {
      std::swap(a, b);
      a_is_start = !a_is_start;
    }
  }
  return make_error(ErrorCode::kBudgetExhausted, "geometric_path: iteration budget exhausted");
}

}  // namespace bridgenav
