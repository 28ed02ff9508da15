#include "bridgenav/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace bridgenav {

Vec Plan::position(long step) const {
  const long i = std::clamp(step - delay_steps, 0L, horizon());
  return trajectory[static_cast<std::size_t>(i)].p;
}

namespace {

double collide_threshold(double r) { return 2.0 * r - kGeomEps; }

}  // namespace

std::optional<double> plans_collide(const Plan& a, const Plan& b, double r, bool hold_poses) {
  const double limit = collide_threshold(r);
  const long n0 = hold_poses ? std::min(a.delay_steps, b.delay_steps) : std::max(a.delay_steps, b.delay_steps);
  const long n1 = hold_poses ? std::max(a.end_step(), b.end_step()) : std::min(a.end_step(), b.end_step());
  for (long n = n0; n <= n1; ++n) {
    if (n < a.delay_steps && n < b.delay_steps) continue;
    if (distance(a.position(n), b.position(n)) < limit) return static_cast<double>(n) * a.dt();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PlanIndex

PlanIndex::PlanIndex(const Trajectory& t) : points_(t.positions()) {
  const long n = static_cast<long>(points_.size());
  blocks_ = std::max(1L, (n + kBlock - 1) / kBlock);
  while (leaves_ < blocks_) leaves_ *= 2;
  nodes_.assign(static_cast<std::size_t>(2 * leaves_), Aabb{});
  for (long i = 0; i < n; ++i) nodes_[static_cast<std::size_t>(leaves_ + i / kBlock)].extend(points_[i]);
  for (long i = leaves_ - 1; i >= 1; --i) {
    Aabb box = nodes_[static_cast<std::size_t>(2 * i)];
    box.extend(nodes_[static_cast<std::size_t>(2 * i + 1)]);
    nodes_[static_cast<std::size_t>(i)] = box;
  }
}

Aabb PlanIndex::range_box(long lo, long hi) const {
  Aabb box;
  const long last = static_cast<long>(points_.size()) - 1;
  if (last < 0) return box;
  lo = std::clamp(lo, 0L, last);
  hi = std::clamp(hi, 0L, last);
  if (lo > hi) return box;
  const long bl = lo / kBlock, bh = hi / kBlock;
  if (bl == bh) {
    for (long i = lo; i <= hi; ++i) box.extend(points_[i]);
    return box;
  }
  for (long i = lo; i < (bl + 1) * kBlock; ++i) box.extend(points_[i]);
  for (long i = bh * kBlock; i <= hi; ++i) box.extend(points_[i]);
  // Full blocks strictly between, bottom-up over the implicit tree.
  long l = leaves_ + bl + 1, h = leaves_ + bh - 1;
  while (l <= h) {
    if (l & 1) box.extend(nodes_[static_cast<std::size_t>(l++)]);
    if (!(h & 1)) box.extend(nodes_[static_cast<std::size_t>(h--)]);
    l /= 2;
    h /= 2;
  }
  return box;
}

// ---------------------------------------------------------------------------
// BridgeTracks

BridgeTracks::BridgeTracks(std::span<const Bridge> bridges) {
  for (const Bridge& b : bridges) {
    Track t;
    for (const auto& traj : b.boundaries) t.boundary.push_back(traj.positions());
    const std::size_t steps = t.boundary.empty() ? 0 : t.boundary.front().size();
    for (std::size_t i = 0; i < steps; ++i) {
      Vec c;
      for (const auto& k : t.boundary) c += k[i];
      t.center.push_back(c / static_cast<double>(t.boundary.size()));
      double diam = 0.0;
      for (std::size_t k = 0; k < t.boundary.size(); ++k) {
        for (std::size_t l = k + 1; l < t.boundary.size(); ++l)
          diam = std::max(diam, distance(t.boundary[k][i], t.boundary[l][i]));
      }
      t.diameter.push_back(diam);
    }
    tracks_.push_back(std::move(t));
  }
}

// Leader at bridge step s + offset, trailer at s. The separation is at least
// u . sum_k wA_k (p^k(s + offset) - p^k(s)) - |sum_k (wA_k - wB_k) p^k(s)|
// for any unit u, and the second term is at most beta / 2 * diameter(s).
double BridgeTracks::lower_bound(const Track& t, long offset, double beta) const {
  const long steps = static_cast<long>(t.center.size());
  double bound = std::numeric_limits<double>::infinity();
  for (long s = 0; s + offset < steps; ++s) {
    const Vec shift = t.center[s + offset] - t.center[s];
    const double len = norm(shift);
    if (len <= kGeomEps) return -std::numeric_limits<double>::infinity();
    const Vec u = shift / len;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& k : t.boundary) m = std::min(m, dot(u, k[s + offset] - k[s]));
    bound = std::min(bound, m - 0.5 * beta * t.diameter[s]);
  }
  return bound;
}

bool BridgeTracks::certified(int bridge, long offset, double beta, double r) const {
  if (bridge < 0 || bridge >= static_cast<int>(tracks_.size()) || offset <= 0) return false;
  const int bucket = static_cast<int>(std::ceil(beta * 16.0 - 1e-12));
  const auto key = std::make_tuple(bridge, offset, bucket);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, lower_bound(tracks_[bridge], offset, bucket / 16.0)).first;
  }
  // Margin for the rounding between interpolated and blended waypoints.
  return it->second >= 2.0 * r + 1e-6;
}

// ---------------------------------------------------------------------------
// Pruned pair check

namespace {

struct Window {
  long lo = 1;
  long hi = 0;
  bool contains(long n) const { return n >= lo && n <= hi; }
  bool covers(long a, long b) const { return lo <= a && b <= hi; }
};

struct Scan {
  const Plan& x;
  const PlanIndex& ix;
  const Plan& y;
  const PlanIndex& iy;
  double limit;
  Window mask;
  int* checks;

  // Earliest colliding global step within [glo, ghi] over X's node.
  std::optional<long> visit(long node, long b0, long b1, long glo, long ghi) const {
    const long lo = std::max(glo, x.delay_steps + b0 * PlanIndex::kBlock);
    const long hi = std::min(ghi, x.delay_steps + std::min((b1 + 1) * PlanIndex::kBlock - 1, x.horizon()));
    if (lo > hi || mask.covers(lo, hi)) return std::nullopt;
    const Aabb by = iy.range_box(lo - y.delay_steps, hi - y.delay_steps);
    if (gap(ix.node(node), by) >= limit) return std::nullopt;
    if (b0 == b1) {
      ++*checks;
      for (long n = lo; n <= hi; ++n) {
        if (mask.contains(n)) continue;
        if (distance(x.position(n), y.position(n)) < limit) return n;
      }
      return std::nullopt;
    }
    const long mid = (b0 + b1) / 2;
    if (auto hit = visit(2 * node, b0, mid, lo, hi)) return hit;
    return visit(2 * node + 1, mid + 1, b1, lo, hi);
  }

  std::optional<long> run(long glo, long ghi) const {
    if (glo > ghi) return std::nullopt;
    return visit(1, 0, ix.leaves() - 1, glo, ghi);
  }
};

double weight_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 2.0;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::fabs(a[k] - b[k]);
  return s;
}

// Global steps where both plans are inside the same bridge, if certified.
Window certified_window(const Plan& a, const Plan& b, double r, const BridgeTracks* tracks, int* checks) {
  if (!tracks || a.bridge < 0 || a.bridge != b.bridge) return {};
  const long a0 = a.delay_steps + static_cast<long>(a.marks.bridge);
  const long a1 = a.delay_steps + static_cast<long>(a.marks.exit);
  const long b0 = b.delay_steps + static_cast<long>(b.marks.bridge);
  const long b1 = b.delay_steps + static_cast<long>(b.marks.exit);
  if (a1 - a0 != b1 - b0) return {};
  const Window w{std::max(a0, b0), std::min(a1, b1)};
  if (w.lo > w.hi) return {};
  ++*checks;
  if (!tracks->certified(a.bridge, std::labs(b0 - a0), weight_distance(a.weights, b.weights), r)) return {};
  return w;
}

}  // namespace

PairCheck plans_collide_pruned(const Plan& a, const PlanIndex& ia, const Plan& b, const PlanIndex& ib, double r,
                               const BridgeTracks* tracks, bool hold_poses) {
  PairCheck out;
  const double limit = collide_threshold(r);
  const Window mask = certified_window(a, b, r, tracks, &out.checks);
  const long n0 = hold_poses ? std::min(a.delay_steps, b.delay_steps) : std::max(a.delay_steps, b.delay_steps);
  const long n1 = hold_poses ? std::max(a.end_step(), b.end_step()) : std::min(a.end_step(), b.end_step());
  // B moves while A holds its start pose, then A moves, then B moves while A
  // holds its goal pose.
  const Scan by_b{b, ib, a, ia, limit, mask, &out.checks};
  const Scan by_a{a, ia, b, ib, limit, mask, &out.checks};
  std::optional<long> hit = by_b.run(n0, std::min(n1, a.delay_steps - 1));
  if (!hit) hit = by_a.run(std::max(n0, a.delay_steps), std::min(n1, a.end_step()));
  if (!hit) hit = by_b.run(std::max(n0, a.end_step() + 1), n1);
  if (hit) out.collision = static_cast<double>(*hit) * a.dt();
  return out;
}

// ---------------------------------------------------------------------------
// schedule_all

Outcome<std::vector<Plan>> schedule_all(std::vector<Plan> plans, double r, const ScheduleConfig& cfg,
                                        ScheduleStats* stats) {
  ScheduleStats local;
  ScheduleStats& st = stats ? *stats : local;
  if (plans.empty()) return plans;
  if (!(r > 0.0) || !(cfg.cap_factor > 0.0))
    return make_error(ErrorCode::kInvalidInput, "schedule_all: bad radius or cap");
  const double dt = plans.front().dt();
  for (const Plan& p : plans) {
    if (p.trajectory.empty() || p.delay_steps < 0 || std::fabs(p.dt() - dt) > 1e-12 * dt)
      return make_error(ErrorCode::kInvalidInput, "schedule_all: plan " + std::to_string(p.agent) +
                                                       " is empty, negatively delayed, or on another time step");
  }
  const double delta = cfg.delta > 0.0 ? cfg.delta : dt;
  const long step = std::lround(delta / dt);
  if (step < 1 || std::fabs(static_cast<double>(step) * dt - delta) > 1e-9 * delta)
    return make_error(ErrorCode::kInvalidInput, "schedule_all: delta must be a positive multiple of dt");

  std::vector<PlanIndex> index;
  index.reserve(plans.size());
  for (const Plan& p : plans) index.emplace_back(p.trajectory);

  const auto check = [&](std::size_t i, std::size_t j) -> std::optional<double> {
    ++st.pair_checks;
    if (!cfg.pruned) return plans_collide(plans[i], plans[j], r, cfg.hold_poses);
    const PairCheck c = plans_collide_pruned(plans[i], index[i], plans[j], index[j], r, cfg.tracks, cfg.hold_poses);
    st.segment_checks += c.checks;
    return c.collision;
  };

  for (std::size_t i = 1; i < plans.size(); ++i) {
    Plan& p = plans[i];
    const long start = p.delay_steps;
    const long cap = static_cast<long>(cfg.cap_factor * static_cast<double>(std::max(1L, p.horizon())));
    std::size_t last_hit = 0;
    for (;;) {
      std::optional<std::size_t> blocker;
      std::optional<double> when;
      if ((when = check(i, last_hit))) blocker = last_hit;
      for (std::size_t j = 0; j < i && !blocker; ++j) {
        if (j == last_hit) continue;
        if ((when = check(i, j))) blocker = j;
      }
      if (!blocker) break;
      last_hit = *blocker;
      const long at = std::lround(*when / dt);
      const auto where = [&] {
        const Vec q = p.position(at);
        char buf[128];
        std::snprintf(buf, sizeof buf, " at t = %g s near (%g, %g, %g)", *when, q.x, q.y, q.z);
        return std::string(buf);
      };
      if (cfg.hold_poses && at < p.delay_steps) {
        return make_error(ErrorCode::kUnschedulable, "schedule_all: agent " + std::to_string(p.agent) +
                                                         " is blocked at its start pose by agent " +
                                                         std::to_string(plans[*blocker].agent) + where());
      }
      // Postponing only moves the same contact later while the other agent
      // keeps holding its goal pose.
      if (cfg.hold_poses && at >= plans[*blocker].end_step()) {
        return make_error(ErrorCode::kUnschedulable, "schedule_all: agent " + std::to_string(p.agent) +
                                                         " passes the goal pose of agent " +
                                                         std::to_string(plans[*blocker].agent) + where());
      }
      p.delay_steps += step;
      ++st.postponements;
      if (p.delay_steps - start > cap) {
        return make_error(ErrorCode::kUnschedulable, "schedule_all: agent " + std::to_string(p.agent) +
                                                         " exceeds the delay cap against agent " +
                                                         std::to_string(plans[*blocker].agent));
      }
    }
  }
  return plans;
}

}  // namespace bridgenav
