#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "bridgenav/io.hpp"
#include "json.hpp"

using namespace bridgenav;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kPipelineFailure = 1;
constexpr int kInvalidInput = 2;

int report(const Error& e) {
  std::cerr << "error: " << to_string(e.code) << ": " << e.message << "\n";
  return e.code == ErrorCode::kInvalidInput ? kInvalidInput : kPipelineFailure;
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_dir, bool plots) {
  auto s = load_scenario(path);
  if (!s) return report(s.error());
  if (seed) s->seed = *seed;
  auto r = run_scenario(*s);
  if (!r) return report(r.error());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
    return kInvalidInput;
  }
  const fs::path dir(out_dir);
  std::ostringstream log;
  write_trajectory_log(log, *r, s->dimension);
  bool ok = write_file(dir / "scenario.json", serialize_scenario(*s)) &&
            write_file(dir / "trajectories.csv", log.str()) &&
            write_file(dir / "metrics.json", metrics_json(*s, *r));
  if (plots) {
    std::ostringstream svg;
    write_svg(svg, *s, *r);
    ok = ok && write_file(dir / ((s->name.empty() ? std::string("scenario") : s->name) + ".svg"), svg.str());
  }
  if (!ok) {
    std::cerr << "error: writing results to " << out_dir << " failed\n";
    return kPipelineFailure;
  }
  const SimMetrics& m = r->metrics;
  std::cout << s->name << ": " << s->agents.size() << " agents, " << m.bridge_count << " bridges, " << m.frames
            << " frames (" << m.frames_seconds << " s), agent-agent events " << m.agent_agent_collision_events
            << ", agent-obstacle events " << m.agent_obstacle_collision_events << "\n";
  if (m.agent_agent_collision_events > 0 || m.agent_obstacle_collision_events > 0) {
    std::cerr << "error: audit found collision events\n";
    return kPipelineFailure;
  }
  return kOk;
}

int bench(const std::string& path, int reps) {
  auto s = load_scenario(path);
  if (!s) return report(s.error());
  std::map<std::string, std::vector<double>> samples;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_scenario(*s, {.measure_interpolation = true, .check_pruning = false});
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r) return report(r.error());
    const PhaseTiming& t = r->metrics.timing;
    samples["assign"].push_back(t.assign);
    samples["compose"].push_back(t.compose);
    samples["schedule"].push_back(t.schedule);
    samples["audit"].push_back(t.audit);
    samples["interpolate_median_per_agent"].push_back(t.interpolate_median);
    samples["total"].push_back(total);
  }
  nlohmann::ordered_json j;
  j["scenario"] = s->name;
  j["reps"] = reps;
  for (auto& [phase, v] : samples) {
    std::sort(v.begin(), v.end());
    const double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    j["seconds"][phase] = {{"min", v.front()}, {"median", median}};
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int validate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot open\n";
    return kInvalidInput;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  auto s = parse_scenario_unchecked(buf.str());
  if (!s) {
    std::cerr << path << ": " << s.error().message << "\n";
    return kInvalidInput;
  }
  const auto violations = scenario_violations(*s);
  for (const std::string& v : violations) std::cerr << path << ": " << v << "\n";
  if (!violations.empty()) return kInvalidInput;
  std::cout << path << ": ok (" << s->agents.size() << " agents, " << s->obstacles.size() << " convex obstacles)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent navigation through interpolating bridges"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  bool plots = false;
  CLI::App* run_cmd = app.add_subcommand("run", "Plan, schedule and audit a scenario");
  run_cmd->add_option("scenario", scenario, "Scenario file")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run_cmd->add_flag("--plots", plots, "Write an SVG plot");

  int reps = 1;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Time the pipeline phases");
  bench_cmd->add_option("scenario", scenario, "Scenario file")->required();
  bench_cmd->add_option("--reps", reps, "Repetitions")->required()->check(CLI::PositiveNumber);

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", scenario, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (*run_cmd) return run(scenario, seed, out_dir, plots);
    if (*bench_cmd) return bench(scenario, reps);
    return validate(scenario);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipelineFailure;
  }
}
