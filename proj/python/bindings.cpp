#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "bridgenav/io.hpp"
#include "bridgenav/rrt.hpp"
#include "bridgenav/sim.hpp"

namespace py = pybind11;
using namespace bridgenav;

namespace {

Vec to_vec(const std::vector<double>& c) {
  if (c.size() < 2 || c.size() > 3) throw py::value_error("points need 2 or 3 coordinates");
  return {c[0], c[1], c.size() == 3 ? c[2] : 0.0};
}

template <typename T>
T unwrap(Outcome<T> o) {
  if (!o.ok()) throw BridgeError(o.error());
  return std::move(*o);
}

// Rows of `dim` coordinates taken from each waypoint by `field`.
template <typename F>
py::array_t<double> rows(const Trajectory& t, int dim, F field) {
  py::array_t<double> out({static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(dim)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec v = field(t[i]);
    for (int d = 0; d < dim; ++d) m(static_cast<py::ssize_t>(i), d) = v[static_cast<std::size_t>(d)];
  }
  return out;
}

py::dict trajectory_dict(const Trajectory& t, int dim) {
  py::dict d;
  d["dt"] = t.dt();
  d["p"] = rows(t, dim, [](const Waypoint& w) { return w.p; });
  d["v"] = rows(t, dim, [](const Waypoint& w) { return w.v; });
  d["a"] = rows(t, dim, [](const Waypoint& w) { return w.a; });
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bridgenav core bindings";

  static py::exception<BridgeError> error(m, "BridgeNavError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const BridgeError& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<AgentLimits>(m, "Limits")
      .def(py::init([](double radius, double v_max, double a_max, int dimension) {
             return AgentLimits{radius, v_max, a_max, dimension};
           }),
           py::arg("radius"), py::arg("v_max"), py::arg("a_max"), py::arg("dimension") = 2)
      .def_readwrite("radius", &AgentLimits::radius)
      .def_readwrite("v_max", &AgentLimits::v_max)
      .def_readwrite("a_max", &AgentLimits::a_max)
      .def_readwrite("dimension", &AgentLimits::dimension)
      .def("valid", &AgentLimits::valid);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("dimension", &Scenario::dimension)
      .def_readonly("limits", &Scenario::limits)
      .def_readwrite("seed", &Scenario::seed)
      .def_property_readonly("agent_count", [](const Scenario& s) { return s.agents.size(); })
      .def_property_readonly("obstacle_count", [](const Scenario& s) { return s.obstacles.size(); })
      .def_property_readonly("dt", &Scenario::effective_dt)
      .def_property_readonly("tau", &Scenario::effective_tau)
      .def("to_json", &serialize_scenario);

  py::class_<SimResult>(m, "Result")
      .def_readonly("dt", &SimResult::dt)
      .def_property_readonly("collision_events",
                             [](const SimResult& r) {
                               return py::make_tuple(r.metrics.agent_agent_collision_events,
                                                     r.metrics.agent_obstacle_collision_events);
                             })
      .def_property_readonly("bridge_count", [](const SimResult& r) { return r.metrics.bridge_count; })
      .def_property_readonly("frames", [](const SimResult& r) { return r.metrics.frames; })
      .def_property_readonly("delays", [](const SimResult& r) {
        std::vector<long> d;
        for (const Plan& p : r.plans) d.push_back(p.delay_steps);
        return d;
      })
      .def("trajectory", [](const SimResult& r, int agent, int dim) {
        if (agent < 0 || static_cast<std::size_t>(agent) >= r.plans.size()) throw py::index_error("agent out of range");
        return trajectory_dict(r.plans[static_cast<std::size_t>(agent)].trajectory, dim);
      }, py::arg("agent"), py::arg("dimension") = 2)
      .def("trajectory_log", [](const SimResult& r, int dim) {
        std::ostringstream out;
        write_trajectory_log(out, r, dim);
        return out.str();
      }, py::arg("dimension") = 2)
      .def("metrics_json", [](const SimResult& r, const Scenario& s) { return metrics_json(s, r); })
      .def("svg", [](const SimResult& r, const Scenario& s) {
        std::ostringstream out;
        write_svg(out, s, r);
        return out.str();
      });

  m.def("parse_scenario", [](const std::string& text) { return unwrap(parse_scenario(text)); }, py::arg("text"));
  m.def("load_scenario", [](const std::string& path) { return unwrap(load_scenario(path)); }, py::arg("path"));
  m.def("scenario_violations", [](const std::string& text) {
    return scenario_violations(unwrap(parse_scenario_unchecked(text)));
  }, py::arg("text"), "Every invariant violation of a scenario document.");

  m.def("run", [](const Scenario& s, bool check_pruning) {
    RunOptions opt;
    opt.check_pruning = check_pruning;
    py::gil_scoped_release release;
    return unwrap(run_scenario(s, opt));
  }, py::arg("scenario"), py::arg("check_pruning") = true);

  m.def("optimal_connect",
        [](const std::vector<double>& p0, const std::vector<double>& v0, const std::vector<double>& p1,
           const std::vector<double>& v1, const AgentLimits& limits, double dt) {
          const Trajectory t = unwrap(optimal_connect({to_vec(p0), to_vec(v0)}, {to_vec(p1), to_vec(v1)}, limits, dt));
          return trajectory_dict(t, limits.dimension);
        },
        py::arg("p0"), py::arg("v0"), py::arg("p1"), py::arg("v1"), py::arg("limits"), py::arg("dt"));

  m.def("travel_time", [](const std::vector<double>& a, const std::vector<double>& b, const AgentLimits& limits) {
    return travel_time(to_vec(a), to_vec(b), limits);
  }, py::arg("a"), py::arg("b"), py::arg("limits"));

  m.def("geometric_path",
        [](const std::vector<double>& start, const std::vector<double>& goal,
           const std::vector<std::vector<std::vector<double>>>& polygons, double inflation,
           const std::vector<double>& lo, const std::vector<double>& hi, double step, int max_iterations,
           std::uint64_t seed) {
          std::vector<Obstacle> obstacles;
          for (const auto& poly : polygons) {
            Obstacle o;
            for (const auto& c : poly) o.vertices.push_back(to_vec(c));
            o.inflation = inflation;
            obstacles.push_back(std::move(o));
          }
          const int dim = start.size() == 3 ? 3 : 2;
          const auto path = unwrap(geometric_path(to_vec(start), to_vec(goal), ObstacleSet(std::move(obstacles)),
                                                  {to_vec(lo), to_vec(hi)}, dim, step, max_iterations, seed));
          std::vector<std::vector<double>> out;
          for (const Vec& p : path) out.push_back(dim == 3 ? std::vector<double>{p.x, p.y, p.z} : std::vector<double>{p.x, p.y});
          return out;
        },
        py::arg("start"), py::arg("goal"), py::arg("polygons"), py::arg("inflation"), py::arg("lo"), py::arg("hi"),
        py::arg("step"), py::arg("max_iterations") = 50000, py::arg("seed") = 1,
        "Holonomic path around convex 2D polygons.");

  m.def("entrance_line_length", &entrance_line_length, py::arg("v_max"), py::arg("a_max"));
  m.def("entrance_turn_time", &entrance_turn_time, py::arg("v_max"), py::arg("a_max"));
}
