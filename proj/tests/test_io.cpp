#include <cmath>
#include <random>
#include <sstream>

#include "bridgenav/io.hpp"
#include "doctest.h"

using namespace bridgenav;

namespace {

// Crossing-number point-in-polygon, independent of the library.
bool inside(const std::vector<Vec>& poly, const Vec& q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec& a = poly[i];
    const Vec& b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

double area(const std::vector<Vec>& p) {
  double a = 0;
  for (std::size_t i = 0; i < p.size(); ++i) a += p[i].x * p[(i + 1) % p.size()].y - p[(i + 1) % p.size()].x * p[i].y;
  return a / 2;
}

const char* kScenario = R"({
  "name": "small",
  "dimension": 2,
  "bounds": {"lo": [0, 0], "hi": [200, 100]},
  "seed": 7,
  "limits": {"radius": 5, "v_max": 3, "a_max": 2},
  "obstacles": [
    {"box": {"lo": [90, 0], "hi": [110, 42]}},
    {"polygon": [[90, 58], [110, 58], [110, 100], [100, 100], [100, 70], [90, 70]]}
  ],
  "agents": [
    {"start": [40, 50], "goal": [160, 50]},
    {"start": [160, 20], "goal": [40, 20]}
  ]
})";

}  // namespace

TEST_CASE("convex_decomposition covers the polygon") {
  const std::vector<std::vector<Vec>> shapes{
      {{0, 0}, {10, 0}, {10, 10}, {0, 10}},
      {{0, 0}, {10, 0}, {10, 3}, {3, 3}, {3, 10}, {0, 10}},
      {{0, 0}, {0, 10}, {5, 4}, {10, 10}, {10, 0}},  // clockwise, concave
      {{0, 0}, {4, 1}, {8, 0}, {7, 4}, {8, 8}, {4, 7}, {0, 8}, {1, 4}},
  };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 11);
  for (const auto& shape : shapes) {
    auto pieces = convex_decomposition(shape);
    REQUIRE(pieces.ok());
    double total = 0;
    for (const auto& piece : *pieces) {
      CHECK(area(piece) > 0);
      for (std::size_t i = 0; i < piece.size(); ++i) {
        const Vec& a = piece[i];
        const Vec& b = piece[(i + 1) % piece.size()];
        const Vec& c = piece[(i + 2) % piece.size()];
        CHECK((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) > 0);
      }
      total += area(piece);
    }
    CHECK(total == doctest::Approx(std::fabs(area(shape))).epsilon(1e-12));
    for (int i = 0; i < 2000; ++i) {
      const Vec q{u(rng), u(rng)};
      bool any = false;
      for (const auto& piece : *pieces) any = any || inside(piece, q);
      CHECK(any == inside(shape, q));
    }
  }
  CHECK(convex_decomposition(shapes[0])->size() == 1);
  CHECK(convex_decomposition(shapes[1])->size() == 2);
  const std::vector<Vec> bowtie{{0, 0}, {10, 10}, {10, 0}, {0, 10}};
  CHECK(convex_decomposition(bowtie).error().code == ErrorCode::kInvalidInput);
  const std::vector<Vec> flat{{0, 0}, {5, 0}, {10, 0}};
  CHECK_FALSE(convex_decomposition(flat).ok());
}

TEST_CASE("convex_mesh orients faces outward") {
  const Obstacle b = box_obstacle({0, 0, 0}, {1, 2, 3}, 3);
  auto m = convex_mesh(b.vertices, b.faces);
  REQUIRE(m.ok());
  CHECK(m->faces == b.faces);
  auto flipped = b.faces;
  for (auto& f : flipped) std::swap(f[1], f[2]);
  CHECK(convex_mesh(b.vertices, flipped)->faces == b.faces);
  auto dented = b.vertices;
  dented.push_back({0.5, 1, 1.5});
  auto faces = b.faces;
  faces.push_back({8, 0, 1});
  CHECK_FALSE(convex_mesh(dented, faces).ok());
}

TEST_CASE("parse_scenario reads the documented format") {
  auto s = parse_scenario(kScenario);
  REQUIRE(s.ok());
  CHECK(s->name == "small");
  CHECK(s->seed == 7);
  CHECK(s->limits.radius == 5);
  CHECK(s->limits.dimension == 2);
  CHECK(s->agents.size() == 2);
  CHECK(s->obstacles.size() == 3);  // the concave polygon splits in two
  CHECK(s->bounds.hi == Vec{200, 100, 0});
}

TEST_CASE("parse errors carry line and column") {
  auto s = parse_scenario("{\n  \"dimension\": 2,\n  \"bounds\": ]\n}");
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().code == ErrorCode::kInvalidInput);
  CHECK(s.error().message.rfind("line 3, column 13", 0) == 0);
}

TEST_CASE("field errors carry the field path") {
  std::string text = kScenario;
  text.replace(text.find("[40, 20]"), 8, "[40]");
  auto s = parse_scenario(text);
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().message.rfind("agents[1].goal", 0) == 0);

  text = kScenario;
  text.replace(text.find("\"v_max\": 3"), 10, "\"v_max\": \"3\"");
  CHECK(parse_scenario(text).error().message.rfind("limits.v_max", 0) == 0);

  text = kScenario;
  text.replace(text.find("[160, 20]"), 9, "[43, 52]");
  s = parse_scenario(text);
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().message.find("agents[1].start") != std::string::npos);
  CHECK(s.error().message.find("agents[0].start") != std::string::npos);

  text = kScenario;
  text.replace(text.find("[40, 50]"), 8, "[100, 20]");
  CHECK(parse_scenario(text).error().message.rfind("agents[0].start", 0) == 0);
}

TEST_CASE("serialization round trip") {
  const Scenario s = parse_scenario(kScenario).value();
  const std::string text = serialize_scenario(s);
  auto back = parse_scenario(text);
  REQUIRE(back.ok());
  CHECK(*back == s);
  CHECK(serialize_scenario(*back) == text);

  Scenario d3;
  d3.name = "cube";
  d3.dimension = 3;
  d3.bounds = {{0, 0, 0}, {50, 40, 40}};
  d3.limits = {3, 2, 1, 3};
  d3.dt = 0.1 / 3;
  d3.seed = 18446744073709551615ull;
  d3.obstacles = {box_obstacle({20, 0, 0}, {30, 40, 15}, 3)};
  d3.agents = {{{5, 20, 30}, {45, 20, 30}}};
  auto back3 = parse_scenario(serialize_scenario(d3));
  REQUIRE(back3.ok());
  CHECK(*back3 == d3);
}

TEST_CASE("trajectory log layout") {
  Scenario s = parse_scenario(kScenario).value();
  s.agents.pop_back();
  const SimResult r = run_scenario(s).value();
  std::ostringstream out;
  write_trajectory_log(out, r, 2);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "agent_id,step,t,px,py,vx,vy,ax,ay,phase");
  long rows = 0, last_step = -1;
  while (std::getline(in, line)) {
    const long step = std::stol(line.substr(line.find(',') + 1));
    CHECK(step > last_step);
    last_step = step;
    ++rows;
  }
  CHECK(rows == static_cast<long>(r.plans[0].trajectory.size()));
  const std::string m = metrics_json(s, r);
  CHECK(m.find("\"agent_agent_collision_events\": 0") != std::string::npos);
  std::ostringstream svg;
  write_svg(svg, s, r);
  CHECK(svg.str().rfind("<svg", 0) == 0);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(5) == "5");
}
