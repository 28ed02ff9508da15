#include <cmath>
#include <random>

#include "bridgenav/schedule.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bridgenav;

namespace {

const AgentLimits kLimits{5, 3, 2, 2};
constexpr double kDt = 0.05;

Plan route(int agent, const Vec& from, const Vec& to, long delay = 0) {
  Plan p;
  p.agent = agent;
  p.delay_steps = delay;
  p.trajectory = optimal_connect({from, {}}, {to, {}}, kLimits, kDt).value();
  return p;
}

// Independent brute force over the pose-holding convention.
std::optional<long> oracle_collision(const Plan& a, const Plan& b, double r, bool hold) {
  const auto pos = [](const Plan& p, long n) -> std::optional<Vec> {
    const long i = n - p.delay_steps;
    if (i < 0) return p.trajectory.front().p;
    if (i > p.horizon()) return p.trajectory.back().p;
    return p.trajectory[static_cast<std::size_t>(i)].p;
  };
  const long last = std::max(a.delay_steps + a.horizon(), b.delay_steps + b.horizon());
  for (long n = 0; n <= last; ++n) {
    const bool a_moving = n >= a.delay_steps && n <= a.delay_steps + a.horizon();
    const bool b_moving = n >= b.delay_steps && n <= b.delay_steps + b.horizon();
    if (!hold && !(a_moving && b_moving)) continue;
    if (n < a.delay_steps && n < b.delay_steps) continue;
    const Vec pa = *pos(a, n), pb = *pos(b, n);
    const double dx = pa.x - pb.x, dy = pa.y - pb.y, dz = pa.z - pb.z;
    if (std::sqrt(dx * dx + dy * dy + dz * dz) < 2 * r - 1e-9) return n;
  }
  return std::nullopt;
}

bool same(const std::optional<double>& t, const std::optional<long>& step) {
  if (t.has_value() != step.has_value()) return false;
  return !t || std::fabs(*t - static_cast<double>(*step) * kDt) <= 1e-9;
}

}  // namespace

TEST_CASE("plans_collide examples") {
  const Plan a = route(0, {0, 0, 0}, {60, 0, 0});
  const auto hit = plans_collide(a, a, 5);
  REQUIRE(hit.has_value());
  CHECK(*hit == 0.0);

  // Same path, second one delayed: the minimal clearing delay agrees with the oracle.
  long k = 0;
  for (Plan b = a; oracle_collision(a, b, 5, false); ++b.delay_steps) k = b.delay_steps + 1;
  Plan b = a;
  b.delay_steps = k;
  CHECK_FALSE(plans_collide(a, b, 5, false).has_value());
  b.delay_steps = k - 1;
  CHECK(plans_collide(a, b, 5, false).has_value());
  CHECK(k > 0);

  // Perpendicular crossing.
  const Plan h = route(0, {-50, 0, 0}, {50, 0, 0});
  for (long d : {0L, 20L, 60L, 100L, 200L, 400L, 800L}) {
    const Plan v = route(1, {0, -50, 0}, {0, 50, 0}, d);
    CHECK(same(plans_collide(h, v, 5), oracle_collision(h, v, 5, true)));
  }
  CHECK(plans_collide(h, route(1, {0, -50, 0}, {0, 50, 0}, 0), 5).has_value());
  CHECK_FALSE(plans_collide(h, route(1, {0, -50, 0}, {0, 50, 0}, 800), 5).has_value());
}

TEST_CASE("pruned pair check equals the exhaustive scan") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 100);
  std::uniform_int_distribution<long> d(0, 200);
  int collisions = 0;
  for (int i = 0; i < 1000; ++i) {
    const Plan a = route(0, {u(rng), u(rng), 0}, {u(rng), u(rng), 0}, d(rng));
    const Plan b = route(1, {u(rng), u(rng), 0}, {u(rng), u(rng), 0}, d(rng));
    const PlanIndex ia(a.trajectory), ib(b.trajectory);
    for (bool hold : {true, false}) {
      const auto full = plans_collide(a, b, 5, hold);
      CHECK(same(full, oracle_collision(a, b, 5, hold)));
      const PairCheck pruned = plans_collide_pruned(a, ia, b, ib, 5, nullptr, hold);
      CHECK(pruned.collision == full);
      CHECK(plans_collide_pruned(b, ib, a, ia, 5, nullptr, hold).collision == full);
      collisions += full.has_value();
    }
  }
  CHECK(collisions > 100);
}

TEST_CASE("PlanIndex range boxes") {
  const Plan a = route(0, {0, 0, 0}, {80, 30, 0});
  const PlanIndex ix(a.trajectory);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<long> pick(-5, a.horizon() + 5);
  for (int i = 0; i < 500; ++i) {
    long lo = pick(rng), hi = pick(rng);
    if (lo > hi) std::swap(lo, hi);
    Aabb want;
    for (long n = std::max(0L, lo); n <= std::min(hi, a.horizon()); ++n) want.extend(a.trajectory[n].p);
    if (lo > a.horizon()) want.extend(a.trajectory.back().p);
    if (hi < 0) want.extend(a.trajectory.front().p);
    const Aabb got = ix.range_box(lo, hi);
    CHECK(got.lo == want.lo);
    CHECK(got.hi == want.hi);
  }
}

namespace {

// Plans that only cross a straight bridge from different gate points.
Plan bridge_plan(const Bridge& b, int agent, double offset, long delay) {
  const Vec entry = b.start_center() + b.frame.side * offset;
  Plan p;
  p.agent = agent;
  p.bridge = 0;
  p.delay_steps = delay;
  p.trajectory = interpolate(b, entry).value();
  const auto w = interpolation_weights(b, entry).value();
  p.weights.assign(b.boundaries.size(), 0.0);
  for (std::size_t k = 0; k < w.index.size(); ++k) p.weights[w.index[k]] += w.weight[k];
  p.marks = {0, 0, p.trajectory.horizon()};
  return p;
}

}  // namespace

TEST_CASE("bridge certificate agrees with the scan") {
  const Bridge b = testing::straight_bridge({0, 0, 0}, 80, 3, kLimits, kDt);
  const std::vector<Bridge> bridges{b};
  const BridgeTracks tracks(bridges);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> off(-3, 3);
  std::uniform_int_distribution<long> d(0, 200);
  int certified = 0;
  for (int i = 0; i < 300; ++i) {
    const Plan p = bridge_plan(b, 0, off(rng), d(rng));
    const Plan q = bridge_plan(b, 1, off(rng), d(rng));
    const PlanIndex ip(p.trajectory), iq(q.trajectory);
    const auto full = plans_collide(p, q, 2.5, false);
    const PairCheck c = plans_collide_pruned(p, ip, q, iq, 2.5, &tracks, false);
    CHECK(c.collision == full);
    const PairCheck plain = plans_collide_pruned(p, ip, q, iq, 2.5, nullptr, false);
    CHECK(c.checks <= plain.checks + 1);
    certified += !full && c.checks == 1;
  }
  CHECK(certified > 0);
}

TEST_CASE("schedule_all examples") {
  SUBCASE("one plan") {
    auto s = schedule_all({route(0, {0, 0, 0}, {50, 0, 0})}, 5);
    REQUIRE(s.ok());
    REQUIRE(s->size() == 1);
    CHECK((*s)[0].delay_steps == 0);
  }
  SUBCASE("identical plans are spaced by the minimal clearing delay") {
    const Plan a = route(0, {0, 0, 0}, {60, 0, 0});
    long k = 0;
    for (Plan b = a; oracle_collision(a, b, 5, false); ++b.delay_steps) k = b.delay_steps + 1;
    std::vector<Plan> plans;
    for (int i = 0; i < 6; ++i) {
      plans.push_back(a);
      plans.back().agent = i;
    }
    ScheduleConfig cfg;
    cfg.hold_poses = false;
    for (bool pruned : {true, false}) {
      cfg.pruned = pruned;
      auto s = schedule_all(plans, 5, cfg);
      REQUIRE(s.ok());
      for (int i = 0; i < 6; ++i) {
        CHECK((*s)[i].agent == i);
        CHECK((*s)[i].delay_steps == i * k);
      }
    }
  }
  SUBCASE("far apart plans keep zero delay") {
    std::vector<Plan> plans;
    for (int i = 0; i < 5; ++i) plans.push_back(route(i, {0, 30.0 * i, 0}, {50, 30.0 * i, 0}));
    auto s = schedule_all(plans, 5);
    REQUIRE(s.ok());
    for (const Plan& p : *s) CHECK(p.delay_steps == 0);
  }
  SUBCASE("a start pose on an earlier path cannot be cleared by waiting") {
    std::vector<Plan> plans{route(0, {0, 0, 0}, {100, 0, 0}), route(1, {50, 2, 0}, {-20, 2, 0})};
    plans[1].delay_steps = 0;
    auto s = schedule_all(plans, 5);
    REQUIRE_FALSE(s.ok());
    CHECK(s.error().code == ErrorCode::kUnschedulable);
    CHECK(s.error().message.find("agent 1") != std::string::npos);
  }
  SUBCASE("a route through an earlier goal pose cannot be cleared by waiting") {
    std::vector<Plan> plans{route(0, {0, 40, 0}, {50, 2, 0}), route(1, {100, 0, 0}, {0, 0, 0}, 0)};
    auto s = schedule_all(plans, 5);
    REQUIRE_FALSE(s.ok());
    CHECK(s.error().code == ErrorCode::kUnschedulable);
    CHECK(s.error().message.find("goal pose of agent 0") != std::string::npos);
  }
  SUBCASE("delay cap") {
    std::vector<Plan> plans{route(0, {0, 0, 0}, {100, 0, 0}), route(1, {100, 2, 0}, {0, 2, 0})};
    ScheduleConfig cfg;
    cfg.cap_factor = 1e-3;
    auto s = schedule_all(plans, 5, cfg);
    REQUIRE_FALSE(s.ok());
    CHECK(s.error().code == ErrorCode::kUnschedulable);
  }
}

TEST_CASE("schedule_all output passes a full pairwise audit") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Plan> plans;
  // Starts on a left column, goals on a right column, crossing paths.
  for (int i = 0; i < 12; ++i) {
    const Vec from{0, 15.0 * i, 0};
    const Vec to{120, 15.0 * ((i * 5) % 12), 0};
    plans.push_back(route(i, from, to));
  }
  ScheduleStats stats;
  auto s = schedule_all(plans, 5, {}, &stats);
  REQUIRE(s.ok());
  for (std::size_t i = 0; i < s->size(); ++i) {
    CHECK((*s)[i].agent == static_cast<int>(i));
    for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(oracle_collision((*s)[i], (*s)[j], 5, true).has_value());
  }
  // Minimality: one step earlier collides with some earlier plan.
  for (std::size_t i = 1; i < s->size(); ++i) {
    if ((*s)[i].delay_steps == 0) continue;
    Plan earlier = (*s)[i];
    --earlier.delay_steps;
    bool hit = false;
    for (std::size_t j = 0; j < i; ++j) hit = hit || oracle_collision(earlier, (*s)[j], 5, true).has_value();
    CHECK(hit);
  }
  CHECK(stats.postponements > 0);
}
