#include "bridgenav/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

namespace bridgenav {

double Scenario::effective_dt() const {
  return dt > 0.0 ? dt : std::min(0.05, limits.radius / (4.0 * limits.v_max));
}

double Scenario::effective_tau() const { return tau > 0.0 ? tau : default_tau(bounds, limits); }

ObstacleSet Scenario::inflated_obstacles() const { return ObstacleSet(obstacles).with_inflation(limits.radius); }

std::vector<std::string> scenario_violations(const Scenario& s) {
  std::vector<std::string> out;
  const auto add = [&out](const std::string& path, const std::string& what) { out.push_back(path + ": " + what); };
  if (s.dimension != 2 && s.dimension != 3) add("dimension", "must be 2 or 3");
  if (!(s.limits.radius > 0.0) || !std::isfinite(s.limits.radius)) add("limits.radius", "must be positive");
  if (!(s.limits.v_max > 0.0) || !std::isfinite(s.limits.v_max)) add("limits.v_max", "must be positive");
  if (!(s.limits.a_max > 0.0) || !std::isfinite(s.limits.a_max)) add("limits.a_max", "must be positive");
  if (s.limits.dimension != s.dimension) add("limits", "dimension differs from the scenario's");
  if (s.bounds.empty() || !is_finite(s.bounds.lo) || !is_finite(s.bounds.hi)) add("bounds", "empty or non-finite");
  if (!(s.dt >= 0.0) || !std::isfinite(s.dt)) add("dt", "must be non-negative");
  if (!(s.tau >= 0.0) || !std::isfinite(s.tau)) add("tau", "must be non-negative");
  if (!out.empty()) return out;
  if (s.limits.v_max * s.effective_dt() >= 0.5 * s.limits.radius) add("dt", "v_max * dt must be below radius / 2");

  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const Obstacle& o = s.obstacles[i];
    const std::string path = "obstacles[" + std::to_string(i) + "]";
    if (s.dimension == 2 && o.vertices.size() < 3) add(path, "polygon needs at least 3 vertices");
    if (s.dimension == 3 && (o.vertices.size() < 4 || o.faces.size() < 4)) add(path, "mesh needs 4 vertices and faces");
    for (const Vec& v : o.vertices) {
      if (!is_finite(v) || (s.dimension == 2 && v.z != 0.0)) {
        add(path, "bad vertex");
        break;
      }
    }
    for (const auto& f : o.faces) {
      for (int k : f) {
        if (k < 0 || k >= static_cast<int>(o.vertices.size())) {
          add(path, "face index out of range");
          break;
        }
      }
    }
  }
  if (!out.empty()) return out;

  const ObstacleSet inflated = s.inflated_obstacles();
  const auto check_point = [&](const Vec& p, const std::string& path) {
    if (!is_finite(p) || (s.dimension == 2 && p.z != 0.0)) {
      add(path, "not a finite point of the scenario's dimension");
    } else if (!s.bounds.contains(p)) {
      add(path, "outside bounds");
    } else if (point_hits_obstacles(p, inflated)) {
      add(path, "inside an inflated obstacle");
    }
  };
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    check_point(s.agents[i].start, "agents[" + std::to_string(i) + "].start");
    check_point(s.agents[i].goal, "agents[" + std::to_string(i) + "].goal");
  }
  const double sep = 2.0 * s.limits.radius;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    for (std::size_t j = i + 1; j < s.agents.size(); ++j) {
      if (distance(s.agents[i].start, s.agents[j].start) < sep)
        add("agents[" + std::to_string(i) + "].start", "overlaps agents[" + std::to_string(j) + "].start");
      if (distance(s.agents[i].goal, s.agents[j].goal) < sep)
        add("agents[" + std::to_string(i) + "].goal", "overlaps agents[" + std::to_string(j) + "].goal");
    }
  }
  return out;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kApproach: return "approach";
    case Phase::kEntrance: return "entrance";
    case Phase::kBridge: return "bridge";
    case Phase::kDepart: return "depart";
  }
  return "?";
}

Phase phase_of(const Plan& plan, std::size_t index) {
  if (index < plan.marks.entrance) return Phase::kApproach;
  if (index < plan.marks.bridge) return Phase::kEntrance;
  if (index < plan.marks.exit) return Phase::kBridge;
  return Phase::kDepart;
}

double scheduling_radius(const AgentLimits& limits, double dt) {
  const double step = limits.v_max * dt;
  return limits.radius + 0.5 * (step * step / (2.0 * limits.radius) + 0.25 * limits.a_max * dt * dt) + kGeomEps;
}

double junction_jump(const Plan& plan) {
  const Trajectory& t = plan.trajectory;
  double worst = 0.0;
  for (std::size_t m : {plan.marks.entrance, plan.marks.bridge, plan.marks.exit}) {
    if (m + 1 >= t.size()) continue;
    const Vec expect = t[m].v + t[m].a * t.dt();
    worst = std::max(worst, norm(t[m + 1].v - expect));
  }
  return worst;
}

namespace {

Vec lateral(const GateFrame& f, const Vec& p) {
  const Vec d = p - f.origin;
  return {dot(d, f.side), dot(d, f.side2), 0.0};
}

Vec closest_on_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = squared_norm(ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return a + ab * t;
}

// Nearest point of the gate cross-section, pulled a hair toward its centroid.
Vec clamp_to_section(const Vec& q, const std::vector<Vec>& section) {
  Vec c;
  for (const Vec& v : section) c += v;
  c = c / static_cast<double>(section.size());
  double extent = 0.0;
  for (const Vec& v : section) extent = std::max(extent, distance(v, c));
  if (extent <= kGeomEps) return c;
  Vec best = q;
  if (section.size() == 2) {
    best = closest_on_segment(q, section[0], section[1]);
  } else {
    double area = 0.0;
    for (std::size_t k = 0; k < section.size(); ++k) area += cross(section[k], section[(k + 1) % section.size()]).z;
    bool inside = true;
    for (std::size_t k = 0; k < section.size() && inside; ++k) {
      const Vec e = section[(k + 1) % section.size()] - section[k];
      inside = cross(e, q - section[k]).z * area >= 0.0;
    }
    if (!inside) {
      double d = 1e300;
      for (std::size_t k = 0; k < section.size(); ++k) {
        const Vec p = closest_on_segment(q, section[k], section[(k + 1) % section.size()]);
        if (distance(p, q) < d) d = distance(p, q), best = p;
      }
    }
  }
  return c + (best - c) * (1.0 - 1e-9);
}

Error tagged(int agent, const char* phase, const Error& e) {
  return {e.code, "agent " + std::to_string(agent) + " phase " + phase + ": " + e.message};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Outcome<Plan> compose_plan(int agent, const AgentTask& task, int site_index, const BridgeSite& site,
                           const AgentLimits& limits, double dt) {
  const Entrance& e = site.entrance;
  const Bridge& b = site.bridge;
  if (std::fabs(b.dt - dt) > 1e-12 * dt)
    return make_error(ErrorCode::kInvalidInput, "compose_plan: bridge time step differs");

  const Vec lat = clamp_to_section(lateral(e.frame, task.start), e.section);
  const Vec target = e.frame.origin + e.frame.forward * -e.depth + e.frame.side * lat.x + e.frame.side2 * lat.y;
  const State arrival{target, e.v0};

  auto approach = optimal_connect({task.start, {}}, arrival, limits, dt);
  if (!approach) return tagged(agent, "approach", approach.error());
  auto adjust = adjust_in_entrance(e, arrival, limits, dt);
  if (!adjust) return tagged(agent, "entrance", adjust.error());
  auto inside = interpolate(b, adjust->back().p);
  if (!inside) return tagged(agent, "bridge", inside.error());
  // Boundaries are padded with rest to a common horizon; a blend that has
  // already stopped leaves the bridge there.
  auto& wps = inside->waypoints();
  const auto still = [&](const Waypoint& w) {
    return norm(w.v) <= kDynEps * limits.v_max && norm(w.a) <= kDynEps * limits.a_max;
  };
  while (wps.size() > 1 && still(wps[wps.size() - 2]) && still(wps.back())) wps.pop_back();
  wps.back().a = {};
  auto depart = optimal_connect(inside->end_state(), {task.goal, {}}, limits, dt);
  if (!depart) return tagged(agent, "depart", depart.error());

  Plan p;
  p.agent = agent;
  p.bridge = site_index;
  const auto w = interpolation_weights(b, adjust->back().p);
  p.weights.assign(b.boundaries.size(), 0.0);
  for (std::size_t k = 0; k < w->index.size(); ++k) p.weights[w->index[k]] += w->weight[k];
  p.trajectory = std::move(*approach);
  p.marks.entrance = p.trajectory.horizon();
  p.trajectory.append(*adjust);
  p.marks.bridge = p.trajectory.horizon();
  p.trajectory.append(*inside);
  p.marks.exit = p.trajectory.horizon();
  p.trajectory.append(*depart);
  return p;
}

bool plan_is_clear(const Plan& plan, const ObstacleSet& obstacles, const AgentLimits& limits) {
  return validate_trajectory(plan.trajectory, limits).empty() &&
         !trajectory_hits_obstacles_dense(plan.trajectory, obstacles, 10);
}

AuditCounts audit(const std::vector<Plan>& plans, const Scenario& s, int substeps) {
  AuditCounts out;
  if (plans.empty() || substeps < 1) return out;
  const double dt = plans.front().dt();
  const double h = dt / substeps;
  const double limit = 2.0 * s.limits.radius - kGeomEps;
  const ObstacleSet obstacles = s.inflated_obstacles();
  const auto pos = [&](const Plan& p, long sample) {
    const double t = static_cast<double>(sample) * h - p.delay();
    return p.trajectory.state_at(std::clamp(t, 0.0, p.trajectory.duration())).p;
  };

  // Obstacles: sample each agent's moving window; held poses extend the
  // first and last sample.
  for (const Plan& p : plans) {
    bool inside = false;
    for (long m = p.delay_steps * substeps; m <= p.end_step() * substeps; ++m) {
      const bool hit = point_hits_obstacles(pos(p, m), obstacles);
      out.agent_obstacle += hit && !inside;
      inside = hit;
    }
  }

  // Agent pairs: per block of steps, only pairs whose swept boxes come
  // within 2r are sampled.
  constexpr long kBlock = 16;
  long last = 0;
  for (const Plan& p : plans) last = std::max(last, p.end_step());
  const std::size_t n = plans.size();
  const double bulge = s.limits.a_max * dt * dt / 8.0 + 1e-9;
  std::vector<long> last_overlap(n * n, -2);
  std::vector<Aabb> boxes(n);
  for (long b0 = 0; b0 <= last; b0 += kBlock) {
    const long b1 = std::min(last, b0 + kBlock);
    for (std::size_t i = 0; i < n; ++i) {
      const Plan& p = plans[i];
      Aabb box;
      const long lo = std::clamp(b0 - p.delay_steps, 0L, p.horizon());
      const long hi = std::clamp(b1 - p.delay_steps, 0L, p.horizon());
      for (long k = lo; k <= hi; ++k) box.extend(p.trajectory[static_cast<std::size_t>(k)].p);
      boxes[i] = box.inflated(bulge);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (gap(boxes[i], boxes[j]) >= limit) continue;
        const long m_end = b1 == last ? b1 * substeps : b1 * substeps - 1;
        for (long m = b0 * substeps; m <= m_end; ++m) {
          if (distance(pos(plans[i], m), pos(plans[j], m)) >= limit) continue;
          long& prev = last_overlap[i * n + j];
          out.agent_agent += prev != m - 1;
          prev = m;
        }
      }
    }
  }
  return out;
}

Outcome<SimResult> run_scenario(const Scenario& s, const RunOptions& options) {
  SimResult result;
  result.dt = s.effective_dt();
  if (s.agents.empty()) return result;
  const auto bad = scenario_violations(s);
  if (!bad.empty()) return make_error(ErrorCode::kInvalidInput, "run_scenario: " + bad.front());

  const double dt = result.dt;
  const ObstacleSet obstacles = s.inflated_obstacles();
  SimMetrics& m = result.metrics;

  AssignConfig acfg;
  acfg.bridge.rrt.bounds = s.bounds;
  acfg.bridge.rrt.dt = dt;
  acfg.bridge.rrt.seed = s.seed;
  acfg.tau = s.effective_tau();

  std::map<std::pair<int, int>, Plan> composed;
  double compose_time = 0.0;
  const AssignFilter filter = [&](int agent, int site_index, const BridgeSite& site) {
    const auto t0 = Clock::now();
    auto plan = compose_plan(agent, s.agents[agent], site_index, site, s.limits, dt);
    const bool ok = plan && plan_is_clear(*plan, obstacles, s.limits);
    if (ok) composed[{agent, site_index}] = std::move(*plan);
    compose_time += seconds_since(t0);
    return ok;
  };
  auto t0 = Clock::now();
  auto assignment = assign_bridges(s.agents, obstacles, s.limits, acfg, filter);
  if (!assignment) return assignment.error();
  m.timing.compose = compose_time;
  m.timing.assign = seconds_since(t0) - compose_time;
  result.sites = std::move(assignment->sites);
  m.bridge_count = static_cast<int>(result.sites.size());

  std::vector<Plan> plans;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    plans.push_back(composed.at({static_cast<int>(i), assignment->bridge_of[i]}));
    m.max_junction_jump = std::max(m.max_junction_jump, junction_jump(plans.back()));
  }

  if (options.measure_interpolation) {
    std::vector<double> times;
    for (const Plan& p : plans) {
      const Vec entry = p.trajectory[p.marks.bridge].p;
      const auto t1 = Clock::now();
      auto t = interpolate(result.sites[p.bridge].bridge, entry);
      times.push_back(seconds_since(t1));
      if (!t) return tagged(p.agent, "bridge", t.error());
    }
    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
    m.timing.interpolate_median = times[times.size() / 2];
  }

  std::vector<Bridge> bridges;
  for (const BridgeSite& site : result.sites) bridges.push_back(site.bridge);
  const BridgeTracks tracks(bridges);
  ScheduleConfig scfg;
  scfg.delta = dt;
  scfg.tracks = &tracks;
  ScheduleStats stats;
  t0 = Clock::now();
  const double r_sched = scheduling_radius(s.limits, dt);
  auto scheduled = schedule_all(std::move(plans), r_sched, scfg, &stats);
  if (!scheduled) return scheduled.error();
  m.timing.schedule = seconds_since(t0);
  m.pair_checks = stats.pair_checks;
  m.segment_checks = stats.segment_checks;
  result.plans = std::move(*scheduled);

  if (options.check_pruning) {
    std::vector<PlanIndex> index;
    for (const Plan& p : result.plans) index.emplace_back(p.trajectory);
    for (std::size_t i = 0; i < result.plans.size(); ++i) {
      for (std::size_t j = i + 1; j < result.plans.size(); ++j) {
        const Plan& a = result.plans[i];
        const Plan& b = result.plans[j];
        if (a.bridge != b.bridge) continue;
        const PairCheck c = plans_collide_pruned(a, index[i], b, index[j], r_sched, &tracks);
        ++m.same_bridge_pairs;
        m.same_bridge_segment_checks += c.checks;
        m.pruned_mismatches += c.collision != plans_collide(a, b, r_sched);
      }
    }
  }

  t0 = Clock::now();
  const AuditCounts counts = audit(result.plans, s, 10);
  m.timing.audit = seconds_since(t0);
  m.agent_agent_collision_events = counts.agent_agent;
  m.agent_obstacle_collision_events = counts.agent_obstacle;
  for (const Plan& p : result.plans) m.frames = std::max(m.frames, p.end_step());
  m.frames_seconds = static_cast<double>(m.frames) * dt;
  return result;
}

}  // namespace bridgenav
