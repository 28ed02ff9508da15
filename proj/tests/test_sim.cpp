#include <algorithm>
#include <cmath>
#include <random>

#include "bridgenav/sim.hpp"
#include "doctest.h"

using namespace bridgenav;

namespace {

Obstacle box(double x0, double y0, double x1, double y1) {
  Obstacle o;
  o.vertices = {{x0, y0, 0}, {x1, y0, 0}, {x1, y1, 0}, {x0, y1, 0}};
  return o;
}

// A wall at x in [90, 110] with one 16-unit hole; three agents per side
// crossing to the other. Lower indices start nearer the wall and end farther
// from it, so no held pose sits on a later agent's route.
Scenario hole_scenario() {
  Scenario s;
  s.name = "hole";
  s.bounds = {{0, 0, 0}, {200, 100, 0}};
  s.obstacles = {box(90, 0, 110, 42), box(90, 58, 110, 100)};
  s.limits = {5, 3, 2, 2};
  s.seed = 3;
  for (int k = 0; k < 3; ++k) {
    s.agents.push_back({{60.0 - 15 * k, 80.0 + 5 * k, 0}, {170.0 - 15 * k, 90.0 - 5 * k, 0}});
    s.agents.push_back({{140.0 + 15 * k, 20.0 - 5 * k, 0}, {30.0 + 15 * k, 10.0 + 5 * k, 0}});
  }
  return s;
}

const SimResult& hole_result() {
  static const SimResult r = run_scenario(hole_scenario()).value();
  return r;
}

}  // namespace

TEST_CASE("run_scenario with no agents") {
  Scenario s = hole_scenario();
  s.agents.clear();
  auto r = run_scenario(s);
  REQUIRE(r.ok());
  CHECK(r->plans.empty());
  CHECK(r->metrics.bridge_count == 0);
  CHECK(r->metrics.agent_agent_collision_events == 0);
  CHECK(r->metrics.frames == 0);
}

TEST_CASE("run_scenario on a single-hole crossing") {
  const Scenario s = hole_scenario();
  const SimResult& r = hole_result();
  const ObstacleSet obs = s.inflated_obstacles();
  CHECK(r.metrics.bridge_count == 2);
  REQUIRE(r.plans.size() == s.agents.size());
  CHECK(r.metrics.agent_agent_collision_events == 0);
  CHECK(r.metrics.agent_obstacle_collision_events == 0);
  CHECK(r.metrics.pruned_mismatches == 0);
  CHECK(r.metrics.max_junction_jump <= 1e-6 * s.limits.v_max);
  long frames = 0;
  for (std::size_t i = 0; i < r.plans.size(); ++i) {
    const Plan& p = r.plans[i];
    CHECK(p.agent == static_cast<int>(i));
    CHECK(validate_trajectory(p.trajectory, s.limits).empty());
    CHECK_FALSE(trajectory_hits_obstacles_dense(p.trajectory, obs, 10));
    CHECK(norm(p.trajectory.front().p - s.agents[i].start) == 0.0);
    CHECK(norm(p.trajectory.back().p - s.agents[i].goal) <= 1e-9 * (1 + norm(s.agents[i].goal)));
    CHECK(norm(p.trajectory.back().v) <= kDynEps);
    CHECK(p.marks.entrance < p.marks.bridge);
    CHECK(p.marks.bridge < p.marks.exit);
    // The bridge phase follows the convex blend of the boundaries.
    const Bridge& b = r.sites[p.bridge].bridge;
    CHECK(p.marks.exit - p.marks.bridge <= b.horizon());
    for (std::size_t t = 0; t <= p.marks.exit - p.marks.bridge; t += 7) {
      Vec blend;
      for (std::size_t k = 0; k < b.boundaries.size(); ++k) blend += b.boundaries[k][t].p * p.weights[k];
      CHECK(norm(p.trajectory[p.marks.bridge + t].p - blend) <= 1e-9);
    }
    frames = std::max(frames, p.delay_steps + p.horizon());
  }
  CHECK(r.metrics.frames == frames);
  for (int k = 0; k < 3; ++k) CHECK(r.plans[2 * k].bridge != r.plans[2 * k + 1].bridge);
}

TEST_CASE("run_scenario through a 3D duct") {
  // A wall at x in [40, 50] with a 14 x 14 duct; two agents per side.
  Scenario s;
  s.name = "duct";
  s.dimension = 3;
  s.bounds = {{0, 0, 0}, {90, 60, 60}};
  s.limits = {3, 2, 1, 3};
  s.seed = 2;
  const auto slab = [](Vec lo, Vec hi) {
    Obstacle o;
    for (int k = 0; k < 8; ++k) o.vertices.push_back({k & 1 ? hi.x : lo.x, k & 2 ? hi.y : lo.y, k & 4 ? hi.z : lo.z});
    o.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
               {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
    return o;
  };
  s.obstacles = {slab({40, 0, 0}, {50, 60, 23}), slab({40, 0, 37}, {50, 60, 60}),
                 slab({40, 0, 23}, {50, 23, 37}), slab({40, 37, 23}, {50, 60, 37})};
  s.agents = {{{25, 30, 40}, {75, 25, 50}}, {{65, 30, 20}, {15, 25, 10}},
              {{15, 35, 45}, {65, 30, 42}}, {{75, 35, 15}, {25, 30, 20}}};
  REQUIRE(scenario_violations(s).empty());
  auto r = run_scenario(s);
  REQUIRE(r.ok());
  CHECK(r->metrics.bridge_count >= 2);
  CHECK(r->metrics.agent_agent_collision_events == 0);
  CHECK(r->metrics.agent_obstacle_collision_events == 0);
  CHECK(r->metrics.max_junction_jump <= 1e-6 * s.limits.v_max);
  for (const Plan& p : r->plans) {
    CHECK(norm(p.trajectory.back().p - s.agents[p.agent].goal) <= 1e-9 * (1 + norm(s.agents[p.agent].goal)));
    CHECK(validate_trajectory(p.trajectory, s.limits).empty());
  }
  CHECK(audit(r->plans, s, 10).agent_agent == audit(r->plans, s, 1).agent_agent);
}

TEST_CASE("scheduling_radius covers the dip between waypoints") {
  // Relative motion of two agents over one step: velocity up to 2 v_max,
  // acceleration up to 2 a_max. Separated by 2R at both samples means
  // separated by 2r throughout.
  const AgentLimits lim{5, 3, 2, 2};
  const double dt = 0.05;
  const double R = scheduling_radius(lim, dt);
  CHECK(R > lim.radius);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto ball = [&](double radius) {
    Vec v;
    do v = {u(rng), u(rng), 0}; while (norm(v) > 1);
    return v * radius;
  };
  double worst = 1e300;
  int tested = 0;
  for (int i = 0; i < 200000; ++i) {
    const Vec w = ball(2 * lim.v_max), acc = ball(2 * lim.a_max);
    const Vec mid = w * (0.5 * dt) + acc * (0.125 * dt * dt);
    // Start so the path passes the origin near its closest approach.
    const Vec side = normalized(perp2(w)) * (2 * R + 0.002 * u(rng));
    const Vec p0 = side - mid;
    const Vec p1 = p0 + w * dt + acc * (0.5 * dt * dt);
    if (norm(p0) < 2 * R || norm(p1) < 2 * R) continue;
    ++tested;
    for (int k = 1; k < 100; ++k) {
      const double t = dt * k / 100.0;
      worst = std::min(worst, norm(p0 + w * t + acc * (0.5 * t * t)));
    }
  }
  CHECK(tested > 1000);
  CHECK(worst >= 2 * lim.radius);
  CHECK(worst < 2 * R);
}

TEST_CASE("run_scenario is deterministic") {
  const SimResult& a = hole_result();
  auto b = run_scenario(hole_scenario());
  REQUIRE(b.ok());
  REQUIRE(a.plans.size() == b->plans.size());
  for (std::size_t i = 0; i < a.plans.size(); ++i) {
    CHECK(a.plans[i].delay_steps == b->plans[i].delay_steps);
    REQUIRE(a.plans[i].trajectory.size() == b->plans[i].trajectory.size());
    bool same = true;
    for (std::size_t k = 0; k < a.plans[i].trajectory.size(); ++k) {
      same = same && a.plans[i].trajectory[k].p == b->plans[i].trajectory[k].p &&
             a.plans[i].trajectory[k].v == b->plans[i].trajectory[k].v;
    }
    CHECK(same);
  }
}

TEST_CASE("audit sanity") {
  const Scenario s = hole_scenario();
  const SimResult& r = hole_result();
  CHECK(audit(r.plans, s, 10).agent_agent == 0);
  CHECK(audit(r.plans, s, 1).agent_agent == 0);
  std::vector<Plan> undelayed = r.plans;
  for (Plan& p : undelayed) p.delay_steps = 0;
  long delayed = 0;
  for (const Plan& p : r.plans) delayed += p.delay_steps > 0;
  if (delayed > 0) CHECK(audit(undelayed, s, 10).agent_agent > 0);
  const std::vector<Plan> one{r.plans.front()};
  CHECK(audit(one, s, 10).agent_agent == 0);
}

TEST_CASE("audit counts maximal overlap intervals") {
  Scenario s;
  s.limits = {1, 3, 2, 2};
  s.bounds = {{-50, -50, 0}, {50, 50, 0}};
  const double dt = 0.05;
  const auto line = [&](const Vec& a, const Vec& b) {
    Plan p;
    p.trajectory = optimal_connect({a, {}}, {b, {}}, s.limits, dt).value();
    return p;
  };
  // Crossing paths meet once.
  std::vector<Plan> plans{line({-20, 0, 0}, {20, 0, 0}), line({0, -20, 0}, {0, 20, 0})};
  CHECK(audit(plans, s, 10).agent_agent == 1);
  // Out and back along the same line against a parked agent: two visits.
  Plan there = line({-20, 0, 0}, {0, 0, 0});
  there.trajectory.append(line({0, 0, 0}, {-20, 0, 0}).trajectory);
  std::vector<Plan> twice{there, line({1, 0, 0}, {1, 0, 0})};
  CHECK(audit(twice, s, 10).agent_agent == 1);
  std::vector<Plan> visits{there, line({0, 30, 0}, {0, 30, 0})};
  CHECK(audit(visits, s, 10).agent_agent == 0);
  // An obstacle on the path.
  s.obstacles = {box(-1, -1, 1, 1)};
  CHECK(audit({line({-20, 0, 0}, {20, 0, 0})}, s, 10).agent_obstacle == 1);
}

TEST_CASE("scenario_violations names fields") {
  Scenario s = hole_scenario();
  CHECK(scenario_violations(s).empty());
  s.agents[4].start = s.agents[1].start + Vec{3, 0, 0};
  const auto v = scenario_violations(s);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().find("agents[1].start") != std::string::npos);
  CHECK(v.front().find("agents[4].start") != std::string::npos);
  s = hole_scenario();
  s.agents[0].goal = {100, 20, 0};
  REQUIRE_FALSE(scenario_violations(s).empty());
  CHECK(scenario_violations(s).front().rfind("agents[0].goal", 0) == 0);
  s = hole_scenario();
  s.limits.v_max = -1;
  CHECK(scenario_violations(s).front().rfind("limits.v_max", 0) == 0);
  auto r = run_scenario(s);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().code == ErrorCode::kInvalidInput);
}
