#include "bridgenav/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace bridgenav {

namespace {

using Json = nlohmann::json;

struct FieldError {
  std::string path;
  std::string what;
};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw FieldError{path, what}; }

const Json& field(const Json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

const Json* optional_field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
std::string join(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Vec point(const Json& j, const std::string& path, int dimension) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dimension)) {
    fail(path, "expected an array of " + std::to_string(dimension) + " numbers");
  }
  Vec v;
  for (int k = 0; k < dimension; ++k) v[k] = number(j[k], join(path, k));
  return v;
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

Aabb box(const Json& j, const std::string& path, int dimension) {
  Aabb b;
  b.lo = point(field(j, path, "lo"), join(path, "lo"), dimension);
  b.hi = point(field(j, path, "hi"), join(path, "hi"), dimension);
  for (int k = 0; k < dimension; ++k) {
    if (!(b.lo[k] < b.hi[k])) fail(path, "lo must be below hi on every axis");
  }
  return b;
}

void parse_obstacle(const Json& j, const std::string& path, int dimension, std::vector<Obstacle>& out) {
  if (!j.is_object()) fail(path, "expected an object");
  if (const Json* poly = optional_field(j, "polygon")) {
    const std::string p = join(path, "polygon");
    if (dimension != 2) fail(p, "polygons need dimension 2");
    std::vector<Vec> vs;
    for (std::size_t i = 0; i < array(*poly, p).size(); ++i) vs.push_back(point((*poly)[i], join(p, i), 2));
    auto pieces = convex_decomposition(vs);
    if (!pieces) fail(p, pieces.error().message);
    for (auto& piece : *pieces) out.push_back({std::move(piece), {}, 0.0});
  } else if (const Json* mesh = optional_field(j, "mesh")) {
    const std::string p = join(path, "mesh");
    if (dimension != 3) fail(p, "meshes need dimension 3");
    std::vector<Vec> vs;
    const Json& jv = array(field(*mesh, p, "vertices"), join(p, "vertices"));
    for (std::size_t i = 0; i < jv.size(); ++i) vs.push_back(point(jv[i], join(join(p, "vertices"), i), 3));
    std::vector<std::array<int, 3>> fs;
    const Json& jf = array(field(*mesh, p, "faces"), join(p, "faces"));
    for (std::size_t i = 0; i < jf.size(); ++i) {
      const std::string fp = join(join(p, "faces"), i);
      if (!jf[i].is_array() || jf[i].size() != 3) fail(fp, "expected 3 vertex indices");
      std::array<int, 3> f{};
      for (int k = 0; k < 3; ++k) {
        if (!jf[i][k].is_number_integer()) fail(join(fp, k), "expected an integer");
        const long idx = jf[i][k].get<long>();
        if (idx < 0 || idx >= static_cast<long>(vs.size())) fail(join(fp, k), "vertex index out of range");
        f[k] = static_cast<int>(idx);
      }
      fs.push_back(f);
    }
    auto o = convex_mesh(std::move(vs), std::move(fs));
    if (!o) fail(p, o.error().message);
    out.push_back(std::move(*o));
  } else if (const Json* b = optional_field(j, "box")) {
    const Aabb bb = box(*b, join(path, "box"), dimension);
    out.push_back(box_obstacle(bb.lo, bb.hi, dimension));
  } else {
    fail(path, "expected one of polygon, mesh, box");
  }
}

Scenario parse_json(const Json& root) {
  if (!root.is_object()) fail("", "expected an object at top level");
  Scenario s;
  if (const Json* n = optional_field(root, "name")) {
    if (!n->is_string()) fail("name", "expected a string");
    s.name = n->get<std::string>();
  }
  const Json& dim = field(root, "", "dimension");
  if (!dim.is_number_integer() || (dim.get<long>() != 2 && dim.get<long>() != 3)) fail("dimension", "must be 2 or 3");
  s.dimension = static_cast<int>(dim.get<long>());
  s.bounds = box(field(root, "", "bounds"), "bounds", s.dimension);
  if (const Json* dt = optional_field(root, "dt")) s.dt = number(*dt, "dt");
  if (const Json* tau = optional_field(root, "tau")) s.tau = number(*tau, "tau");
  if (const Json* seed = optional_field(root, "seed")) {
    if (!seed->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  const Json& lim = field(root, "", "limits");
  s.limits.radius = number(field(lim, "limits", "radius"), "limits.radius");
  s.limits.v_max = number(field(lim, "limits", "v_max"), "limits.v_max");
  s.limits.a_max = number(field(lim, "limits", "a_max"), "limits.a_max");
  s.limits.dimension = s.dimension;
  if (const Json* obs = optional_field(root, "obstacles")) {
    for (std::size_t i = 0; i < array(*obs, "obstacles").size(); ++i) {
      parse_obstacle((*obs)[i], join("obstacles", i), s.dimension, s.obstacles);
    }
  }
  const Json& agents = array(field(root, "", "agents"), "agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string p = join("agents", i);
    s.agents.push_back({point(field(agents[i], p, "start"), join(p, "start"), s.dimension),
                        point(field(agents[i], p, "goal"), join(p, "goal"), s.dimension)});
  }
  return s;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double cross2(const Vec& o, const Vec& a, const Vec& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double signed_area(std::span<const Vec> p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec& u = p[i];
    const Vec& w = p[(i + 1) % p.size()];
    a += u.x * w.y - w.x * u.y;
  }
  return 0.5 * a;
}

bool segments_cross(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  const double d1 = cross2(a, b, c), d2 = cross2(a, b, d), d3 = cross2(c, d, a), d4 = cross2(c, d, b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  const auto on = [](const Vec& p, const Vec& q, const Vec& r, double side) {
    return std::fabs(side) <= kGeomEps && std::min(p.x, q.x) - kGeomEps <= r.x && r.x <= std::max(p.x, q.x) + kGeomEps &&
           std::min(p.y, q.y) - kGeomEps <= r.y && r.y <= std::max(p.y, q.y) + kGeomEps;
  };
  return on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4);
}

bool is_convex_ccw(std::span<const Vec> p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (cross2(p[i], p[(i + 1) % p.size()], p[(i + 2) % p.size()]) <= kGeomEps) return false;
  }
  return true;
}

// Drops repeated and collinear vertices.
std::vector<Vec> simplified(std::vector<Vec> p) {
  bool changed = true;
  while (changed && p.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Vec& a = p[(i + p.size() - 1) % p.size()];
      const Vec& b = p[i];
      const Vec& c = p[(i + 1) % p.size()];
      const double scale = std::max(norm(b - a) * norm(c - b), kGeomEps);
      if (distance(a, b) <= kGeomEps || std::fabs(cross2(a, b, c)) <= kGeomEps * scale) {
        p.erase(p.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return p;
}

std::string quote(const std::string& s) { return Json(s).dump(); }

std::string point_text(const Vec& v, int dimension) {
  std::string out = "[";
  for (int k = 0; k < dimension; ++k) {
    if (k) out += ", ";
    out += format_number(v[k]);
  }
  return out + "]";
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Outcome<std::vector<std::vector<Vec>>> convex_decomposition(std::span<const Vec> polygon) {
  std::vector<Vec> p = simplified({polygon.begin(), polygon.end()});
  if (p.size() < 3) return Error{ErrorCode::kDegenerate, "polygon has fewer than 3 distinct corners"};
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (j == i + 1 || (i == 0 && j + 1 == p.size())) continue;
      if (segments_cross(p[i], p[(i + 1) % p.size()], p[j], p[(j + 1) % p.size()])) {
        return Error{ErrorCode::kInvalidInput, "polygon edges " + std::to_string(i) + " and " + std::to_string(j) +
                                                   " intersect"};
      }
    }
  }
  if (signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
  if (is_convex_ccw(p)) return std::vector<std::vector<Vec>>{p};

  // Ear clipping over vertex indices.
  std::vector<std::vector<int>> pieces;
  std::vector<int> ring(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) ring[i] = static_cast<int>(i);
  while (ring.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < ring.size() && !clipped; ++i) {
      const int a = ring[(i + ring.size() - 1) % ring.size()], b = ring[i], c = ring[(i + 1) % ring.size()];
      if (cross2(p[a], p[b], p[c]) <= kGeomEps) continue;
      bool empty = true;
      for (int q : ring) {
        if (q == a || q == b || q == c) continue;
        if (cross2(p[a], p[b], p[q]) >= -kGeomEps && cross2(p[b], p[c], p[q]) >= -kGeomEps &&
            cross2(p[c], p[a], p[q]) >= -kGeomEps) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      pieces.push_back({a, b, c});
      ring.erase(ring.begin() + static_cast<long>(i));
      clipped = true;
    }
    if (!clipped) return Error{ErrorCode::kDegenerate, "polygon could not be triangulated"};
  }
  pieces.push_back(ring);

  // Merge pieces across shared diagonals while the union stays convex.
  const auto coords = [&](const std::vector<int>& idx) {
    std::vector<Vec> out;
    for (int i : idx) out.push_back(p[i]);
    return out;
  };
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < pieces.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < pieces.size() && !merged; ++j) {
        const auto& A = pieces[i];
        const auto& B = pieces[j];
        for (std::size_t ea = 0; ea < A.size() && !merged; ++ea) {
          const int u = A[ea], w = A[(ea + 1) % A.size()];
          for (std::size_t eb = 0; eb < B.size(); ++eb) {
            if (B[eb] != w || B[(eb + 1) % B.size()] != u) continue;
            std::vector<int> joined;
            for (std::size_t k = 0; k < A.size(); ++k) joined.push_back(A[(ea + 1 + k) % A.size()]);
            for (std::size_t k = 2; k < B.size(); ++k) joined.push_back(B[(eb + k) % B.size()]);
            if (!is_convex_ccw(coords(joined))) break;
            pieces[i] = std::move(joined);
            pieces.erase(pieces.begin() + static_cast<long>(j));
            merged = true;
            break;
          }
        }
      }
    }
  }
  std::vector<std::vector<Vec>> out;
  for (const auto& piece : pieces) out.push_back(coords(piece));
  return out;
}

Outcome<Obstacle> convex_mesh(std::vector<Vec> vertices, std::vector<std::array<int, 3>> faces) {
  if (vertices.size() < 4 || faces.size() < 4) return Error{ErrorCode::kInvalidInput, "mesh needs 4 vertices and faces"};
  Vec centroid;
  for (const Vec& v : vertices) centroid += v;
  centroid = centroid / static_cast<double>(vertices.size());
  double extent = 0.0;
  for (const Vec& v : vertices) extent = std::max(extent, norm(v - centroid));
  for (auto& f : faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return Error{ErrorCode::kDegenerate, "face repeats a vertex"};
    Vec n = cross(vertices[f[1]] - vertices[f[0]], vertices[f[2]] - vertices[f[0]]);
    if (norm(n) <= kGeomEps * std::max(1.0, extent * extent)) return Error{ErrorCode::kDegenerate, "face has zero area"};
    if (dot(n, vertices[f[0]] - centroid) < 0.0) {
      std::swap(f[1], f[2]);
      n = -n;
    }
    n = normalized(n);
    for (const Vec& v : vertices) {
      if (dot(n, v - vertices[f[0]]) > 1e-9 * std::max(1.0, extent)) {
        return Error{ErrorCode::kInvalidInput, "mesh is not convex"};
      }
    }
  }
  return Obstacle{std::move(vertices), std::move(faces), 0.0};
}

Obstacle box_obstacle(const Vec& lo, const Vec& hi, int dimension) {
  Obstacle o;
  if (dimension == 2) {
    o.vertices = {{lo.x, lo.y, 0}, {hi.x, lo.y, 0}, {hi.x, hi.y, 0}, {lo.x, hi.y, 0}};
    return o;
  }
  for (int k = 0; k < 8; ++k) o.vertices.push_back({k & 1 ? hi.x : lo.x, k & 2 ? hi.y : lo.y, k & 4 ? hi.z : lo.z});
  // Outward triangles, two per side.
  o.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return o;
}

Outcome<Scenario> parse_scenario_unchecked(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string what = e.what();
    if (const auto pos = what.find("; "); pos != std::string::npos) what = what.substr(pos + 2);
    return Error{ErrorCode::kInvalidInput,
                 "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what};
  }
  try {
    return parse_json(root);
  } catch (const FieldError& e) {
    return Error{ErrorCode::kInvalidInput, (e.path.empty() ? std::string("scenario") : e.path) + ": " + e.what};
  }
}

Outcome<Scenario> parse_scenario(std::string_view text) {
  auto s = parse_scenario_unchecked(text);
  if (!s) return s;
  const auto violations = scenario_violations(*s);
  if (!violations.empty()) {
    std::string msg = violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) msg += "\n" + violations[i];
    return Error{ErrorCode::kInvalidInput, msg};
  }
  return s;
}

Outcome<Scenario> load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{ErrorCode::kInvalidInput, path + ": cannot open"};
  std::ostringstream buf;
  buf << in.rdbuf();
  auto s = parse_scenario(buf.str());
  if (!s) return Error{s.error().code, path + ": " + s.error().message};
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  const int d = s.dimension;
  std::ostringstream out;
  out << "{\n";
  out << "  \"name\": " << quote(s.name) << ",\n";
  out << "  \"dimension\": " << d << ",\n";
  out << "  \"bounds\": {\"lo\": " << point_text(s.bounds.lo, d) << ", \"hi\": " << point_text(s.bounds.hi, d)
      << "},\n";
  out << "  \"dt\": " << format_number(s.dt) << ",\n";
  out << "  \"seed\": " << s.seed << ",\n";
  out << "  \"tau\": " << format_number(s.tau) << ",\n";
  out << "  \"limits\": {\"radius\": " << format_number(s.limits.radius)
      << ", \"v_max\": " << format_number(s.limits.v_max) << ", \"a_max\": " << format_number(s.limits.a_max)
      << "},\n";
  out << "  \"obstacles\": [";
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const Obstacle& o = s.obstacles[i];
    out << (i ? ",\n    " : "\n    ");
    std::string verts;
    for (std::size_t k = 0; k < o.vertices.size(); ++k) verts += (k ? ", " : "") + point_text(o.vertices[k], d);
    if (d == 2) {
      out << "{\"polygon\": [" << verts << "]}";
    } else {
      std::string faces;
      for (std::size_t k = 0; k < o.faces.size(); ++k) {
        const auto& f = o.faces[k];
        faces += (k ? ", [" : "[") + std::to_string(f[0]) + ", " + std::to_string(f[1]) + ", " +
                 std::to_string(f[2]) + "]";
      }
      out << "{\"mesh\": {\"vertices\": [" << verts << "], \"faces\": [" << faces << "]}}";
    }
  }
  out << (s.obstacles.empty() ? "],\n" : "\n  ],\n");
  out << "  \"agents\": [";
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    out << (i ? ",\n    " : "\n    ") << "{\"start\": " << point_text(s.agents[i].start, d)
        << ", \"goal\": " << point_text(s.agents[i].goal, d) << "}";
  }
  out << (s.agents.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

void write_trajectory_log(std::ostream& out, const SimResult& result, int dimension) {
  static const char* axes = "xyz";
  out << "agent_id,step,t";
  for (const char* q : {"p", "v", "a"}) {
    for (int k = 0; k < dimension; ++k) out << ',' << q << axes[k];
  }
  out << ",phase\n";
  std::vector<const Plan*> order;
  for (const Plan& p : result.plans) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [](const Plan* a, const Plan* b) { return a->agent < b->agent; });
  std::string row;
  for (const Plan* plan : order) {
    const Trajectory& t = plan->trajectory;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const long step = plan->delay_steps + static_cast<long>(i);
      row = std::to_string(plan->agent) + ',' + std::to_string(step) + ',' +
            format_number(static_cast<double>(step) * result.dt);
      for (const Vec* v : {&t[i].p, &t[i].v, &t[i].a}) {
        for (int k = 0; k < dimension; ++k) row += ',' + format_number((*v)[k]);
      }
      row += ',';
      row += to_string(phase_of(*plan, i));
      out << row << '\n';
    }
  }
}

std::string metrics_json(const Scenario& s, const SimResult& result) {
  const SimMetrics& m = result.metrics;
  nlohmann::ordered_json j;
  j["scenario"] = s.name;
  j["dimension"] = s.dimension;
  j["agents"] = s.agents.size();
  j["seed"] = s.seed;
  j["dt"] = result.dt;
  j["bridge_count"] = m.bridge_count;
  j["agent_agent_collision_events"] = m.agent_agent_collision_events;
  j["agent_obstacle_collision_events"] = m.agent_obstacle_collision_events;
  j["frames"] = m.frames;
  j["frames_seconds"] = m.frames_seconds;
  j["pair_checks"] = m.pair_checks;
  j["segment_checks"] = m.segment_checks;
  j["same_bridge_pairs"] = m.same_bridge_pairs;
  j["same_bridge_segment_checks"] = m.same_bridge_segment_checks;
  j["pruned_mismatches"] = m.pruned_mismatches;
  j["max_junction_jump"] = m.max_junction_jump;
  j["timing_seconds"] = {{"assign", m.timing.assign},
                         {"compose", m.timing.compose},
                         {"schedule", m.timing.schedule},
                         {"audit", m.timing.audit},
                         {"interpolate_median", m.timing.interpolate_median}};
  return j.dump(2) + "\n";
}

namespace {

// Counter-clockwise hull of the (x, y) projections.
std::vector<Vec> hull_xy(std::vector<Vec> pts) {
  for (Vec& p : pts) p.z = 0.0;
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts;
  std::vector<Vec> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

// At most about 400 points, always keeping the last one.
std::string svg_points(const std::vector<Vec>& pts) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / 400);
  for (std::size_t i = 0; i < pts.size(); i += stride) out << (i ? " " : "") << pts[i].x << ',' << pts[i].y;
  if (!pts.empty() && (pts.size() - 1) % stride != 0) out << ' ' << pts.back().x << ',' << pts.back().y;
  return out.str();
}

const char* agent_color(int agent) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[static_cast<std::size_t>(agent) % 10];
}

}  // namespace

void write_svg(std::ostream& out, const Scenario& s, const SimResult& result) {
  const Aabb& b = s.bounds;
  const double w = b.hi.x - b.lo.x, h = b.hi.y - b.lo.y;
  const double stroke = 0.002 * std::max(w, h);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_number(b.lo.x) << ' '
      << format_number(-b.hi.y) << ' ' << format_number(w) << ' ' << format_number(h) << "\" width=\"1000\" height=\""
      << static_cast<int>(1000.0 * h / w) << "\">\n";
  std::string title;
  for (char c : s.name) title += c == '<' ? "&lt;" : c == '>' ? "&gt;" : c == '&' ? "&amp;" : std::string(1, c);
  out << "<title>" << title << "</title>\n";
  out << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"" << format_number(stroke) << "\">\n";
  out << "<rect x=\"" << b.lo.x << "\" y=\"" << b.lo.y << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";
  for (const Obstacle& o : s.obstacles) {
    out << "<polygon points=\"" << svg_points(hull_xy(o.vertices)) << "\" fill=\"#555555\" stroke=\"#333333\"/>\n";
  }
  for (const BridgeSite& site : result.sites) {
    std::vector<Vec> region = hull_xy(site.entrance.region_mesh.vertices);
    if (!region.empty()) {
      out << "<polygon points=\"" << svg_points(region) << "\" fill=\"#ffe9a8\" stroke=\"#d4a017\"/>\n";
    }
    std::vector<Vec> outline;
    for (const Trajectory& t : site.bridge.boundaries) {
      const auto pts = t.positions();
      outline.insert(outline.end(), pts.begin(), pts.end());
      out << "<polyline points=\"" << svg_points(pts) << "\" stroke=\"#000000\"/>\n";
    }
    if (s.dimension == 2 && site.bridge.boundaries.size() == 2) {
      out << "<polyline points=\"" << svg_points(site.bridge.start_gate) << "\" stroke=\"#d4a017\"/>\n";
      out << "<polyline points=\"" << svg_points(site.bridge.end_gate) << "\" stroke=\"#d4a017\"/>\n";
    }
  }
  for (const Plan& p : result.plans) {
    const auto pts = p.trajectory.positions();
    out << "<polyline points=\"" << svg_points(pts) << "\" stroke=\"" << agent_color(p.agent)
        << "\" stroke-opacity=\"0.7\"/>\n";
    const Vec& a = pts.front();
    const Vec& g = pts.back();
    out << "<circle cx=\"" << a.x << "\" cy=\"" << a.y << "\" r=\"" << s.limits.radius << "\" stroke=\""
        << agent_color(p.agent) << "\"/>\n";
    out << "<circle cx=\"" << g.x << "\" cy=\"" << g.y << "\" r=\"" << s.limits.radius << "\" fill=\""
        << agent_color(p.agent) << "\" fill-opacity=\"0.3\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace bridgenav
