#include "bridgenav/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bridgenav {

// ---------------------------------------------------------------------------
// Bvh

Bvh::Bvh(std::span<const Aabb> boxes) {
  if (boxes.empty()) return;
  std::vector<int> items(boxes.size());
  std::iota(items.begin(), items.end(), 0);
  nodes_.reserve(2 * boxes.size());
  build(items, 0, static_cast<int>(items.size()), boxes);
}

int Bvh::build(std::vector<int>& items, int begin, int end, std::span<const Aabb> boxes) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Aabb box;
  for (int i = begin; i < end; ++i) box.extend(boxes[items[i]]);
  nodes_[index].box = box;
  if (end - begin == 1) {
    nodes_[index].item = items[begin];
    return index;
  }
  Aabb centers;
  for (int i = begin; i < end; ++i) centers.extend(boxes[items[i]].center());
  const Vec extent = centers.hi - centers.lo;
  int axis = 0;
  if (extent.y > extent[axis]) axis = 1;
  if (extent.z > extent[axis]) axis = 2;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(items.begin() + begin, items.begin() + mid, items.begin() + end, [&](int a, int b) {
    const double ca = boxes[a].center()[axis];
    const double cb = boxes[b].center()[axis];
    return ca < cb || (ca == cb && a < b);
  });
  const int left = build(items, begin, mid, boxes);
  const int right = build(items, mid, end, boxes);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

bool Bvh::query(const Aabb& q, const std::function<bool(int)>& visit) const {
  if (nodes_.empty()) return false;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!overlaps(node.box, q)) continue;
    if (node.item >= 0) {
      if (visit(node.item)) return true;
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Obstacles

Aabb Obstacle::bounds() const {
  Aabb box;
  for (const Vec& v : vertices) box.extend(v);
  return box.inflated(inflation);
}

ObstacleSet::ObstacleSet(std::vector<Obstacle> obstacles) : obstacles_(std::move(obstacles)) {
  std::vector<Aabb> boxes;
  boxes.reserve(obstacles_.size());
  for (const auto& o : obstacles_) boxes.push_back(o.bounds());
  bvh_ = Bvh(boxes);
}

ObstacleSet ObstacleSet::with_inflation(double inflation) const {
  std::vector<Obstacle> copy = obstacles_;
  for (auto& o : copy) o.inflation = inflation;
  return ObstacleSet(std::move(copy));
}

ObstacleSet ObstacleSet::inflated_by(double extra) const {
  std::vector<Obstacle> copy = obstacles_;
  for (auto& o : copy) o.inflation += extra;
  return ObstacleSet(std::move(copy));
}

// ---------------------------------------------------------------------------
// GJK

namespace {

Vec support(std::span<const Vec> pts, const Vec& dir) {
  std::size_t best = 0;
  double best_dot = dot(pts[0], dir);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = dot(pts[i], dir);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return pts[best];
}

// Solves the m x m symmetric system g * x = rhs (m <= 3). Returns false when
// the system is numerically singular.
bool solve_small(int m, double g[3][3], const double rhs[3], double x[3]) {
  double a[3][4];
  double scale = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      a[i][j] = g[i][j];
      scale = std::fmax(scale, std::fabs(g[i][j]));
    }
    a[i][m] = rhs[i];
  }
  if (scale == 0.0) return false;
  for (int c = 0; c < m; ++c) {
    int pivot = c;
    for (int r = c + 1; r < m; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[pivot][c])) pivot = r;
    if (std::fabs(a[pivot][c]) <= 1e-13 * scale) return false;
    if (pivot != c)
      for (int k = 0; k <= m; ++k) std::swap(a[c][k], a[pivot][k]);
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k <= m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  for (int i = 0; i < m; ++i) x[i] = a[i][m] / a[i][i];
  return true;
}

// Closest point to the origin on the hull of `simplex` (1..4 points).
// Shrinks the simplex to the supporting subset.
Vec closest_on_simplex(std::vector<Vec>& simplex) {
  const int n = static_cast<int>(simplex.size());
  double best_norm = std::numeric_limits<double>::infinity();
  Vec best_point;
  int best_mask = 0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    int idx[4];
    int m = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) idx[m++] = i;
    const Vec w0 = simplex[idx[0]];
    double lambda[4] = {1.0, 0.0, 0.0, 0.0};
    if (m > 1) {
      Vec e[3];
      for (int i = 1; i < m; ++i) e[i - 1] = simplex[idx[i]] - w0;
      double g[3][3];
      double rhs[3];
      double mu[3];
      for (int i = 0; i < m - 1; ++i) {
        for (int j = 0; j < m - 1; ++j) g[i][j] = dot(e[i], e[j]);
        rhs[i] = -dot(e[i], w0);
      }
      if (!solve_small(m - 1, g, rhs, mu)) continue;
      double sum = 0.0;
      for (int i = 0; i < m - 1; ++i) {
        lambda[i + 1] = mu[i];
        sum += mu[i];
      }
      lambda[0] = 1.0 - sum;
    }
    bool valid = true;
    for (int i = 0; i < m; ++i)
      if (lambda[i] < -1e-12) valid = false;
    if (!valid) continue;
    Vec p;
    for (int i = 0; i < m; ++i) p += simplex[idx[i]] * lambda[i];
    const double nrm = squared_norm(p);
    if (nrm < best_norm) {
      best_norm = nrm;
      best_point = p;
      best_mask = mask;
    }
  }
  std::vector<Vec> reduced;
  for (int i = 0; i < n; ++i)
    if (best_mask & (1 << i)) reduced.push_back(simplex[i]);
  simplex = std::move(reduced);
  return best_point;
}

}  // namespace

double convex_distance(std::span<const Vec> a, std::span<const Vec> b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  std::vector<Vec> simplex;
  simplex.reserve(4);
  Vec v = a[0] - b[0];
  double scale = 1.0;
  for (const Vec& p : a) scale = std::fmax(scale, inf_norm(p));
  for (const Vec& p : b) scale = std::fmax(scale, inf_norm(p));
  const double tiny = 1e-14 * scale;
  for (int iter = 0; iter < 128; ++iter) {
    const double vv = squared_norm(v);
    if (vv <= tiny * tiny) return 0.0;
    const Vec w = support(a, -v) - support(b, v);
    if (vv - dot(v, w) <= 1e-12 * vv) break;
    bool duplicate = false;
    for (const Vec& s : simplex)
      if (squared_norm(s - w) <= tiny * tiny) duplicate = true;
    if (duplicate) break;
    simplex.push_back(w);
    const Vec next = closest_on_simplex(simplex);
    if (simplex.size() == 4) return 0.0;
    if (squared_norm(next) >= vv * (1.0 - 1e-15) && iter > 0) {
      v = squared_norm(next) < vv ? next : v;
      break;
    }
    v = next;
  }
  return norm(v);
}

double distance_to_obstacle(std::span<const Vec> hull, const Obstacle& obstacle) {
  return convex_distance(hull, obstacle.vertices);
}

namespace {

bool hull_hits(std::span<const Vec> hull, const ObstacleSet& obstacles) {
  Aabb box;
  for (const Vec& p : hull) box.extend(p);
  return obstacles.bvh().query(box, [&](int i) {
    const Obstacle& o = obstacles.obstacles()[i];
    return distance_to_obstacle(hull, o) <= o.inflation;
  });
}

}  // namespace

bool segment_hits_obstacles(const Vec& a, const Vec& b, const ObstacleSet& obstacles) {
  const Vec seg[2] = {a, b};
  return hull_hits(seg, obstacles);
}

bool point_hits_obstacles(const Vec& p, const ObstacleSet& obstacles) {
  const Vec pt[1] = {p};
  return hull_hits(pt, obstacles);
}

double clearance(const Vec& p, const ObstacleSet& obstacles) {
  double best = std::numeric_limits<double>::infinity();
  const Vec pt[1] = {p};
  for (const Obstacle& o : obstacles.obstacles()) {
    double d = distance_to_obstacle(pt, o) - o.inflation;
    best = std::fmin(best, d);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Strips

Outcome<TriangulatedStrip> triangulate_boundary(std::span<const std::vector<Vec>> boundaries) {
  const int k_count = static_cast<int>(boundaries.size());
  if (k_count < 2) return make_error(ErrorCode::kInvalidInput, "need at least two boundaries");
  const int n = static_cast<int>(boundaries[0].size());
  for (const auto& b : boundaries)
    if (static_cast<int>(b.size()) != n)
      return make_error(ErrorCode::kInvalidInput, "boundaries have mismatched waypoint counts");
  if (n < 1) return make_error(ErrorCode::kInvalidInput, "empty boundary");

  TriangulatedStrip strip;
  strip.boundary_count = k_count;
  strip.waypoint_count = n;
  strip.vertices.reserve(static_cast<std::size_t>(k_count) * n);
  for (const auto& b : boundaries) strip.vertices.insert(strip.vertices.end(), b.begin(), b.end());
  auto at = [n](int k, int i) { return k * n + i; };

  if (k_count == 2) {
    for (int i = 0; i + 1 < n; ++i) {
      strip.triangles.push_back({at(0, i), at(1, i), at(0, i + 1)});
      strip.triangles.push_back({at(0, i + 1), at(1, i), at(1, i + 1)});
    }
    return strip;
  }

  strip.closed = true;
  for (int i = 0; i + 1 < n; ++i) {
    for (int k = 0; k < k_count; ++k) {
      const int kn = (k + 1) % k_count;
      strip.triangles.push_back({at(k, i), at(kn, i), at(k, i + 1)});
      strip.triangles.push_back({at(kn, i), at(kn, i + 1), at(k, i + 1)});
    }
  }
  for (int k = 1; k + 1 < k_count; ++k) {
    strip.triangles.push_back({at(0, 0), at(k + 1, 0), at(k, 0)});
    strip.triangles.push_back({at(0, n - 1), at(k, n - 1), at(k + 1, n - 1)});
  }
  return strip;
}

namespace {

bool triangle_hits(const TriangulatedStrip& strip, std::size_t t, const Obstacle& o) {
  const auto tri = strip.triangle(t);
  return distance_to_obstacle(tri, o) <= o.inflation;
}

bool enclosed_obstacle(const TriangulatedStrip& strip, const ObstacleSet& obstacles) {
  if (!strip.closed) return false;
  Aabb box;
  for (const Vec& v : strip.vertices) box.extend(v);
  for (const Obstacle& o : obstacles.obstacles()) {
    if (!box.contains(o.vertices.front())) continue;
    if (point_inside_closed_mesh(o.vertices.front(), strip.vertices, strip.triangles)) return true;
  }
  return false;
}

}  // namespace

bool strip_collides(const TriangulatedStrip& strip, const ObstacleSet& obstacles) {
  if (obstacles.empty() || strip.triangles.empty()) return false;
  std::vector<Aabb> boxes;
  boxes.reserve(strip.triangles.size());
  for (std::size_t t = 0; t < strip.triangles.size(); ++t) {
    Aabb b;
    for (const Vec& v : strip.triangle(t)) b.extend(v);
    boxes.push_back(b);
  }
  const Bvh tree(boxes);
  for (const Obstacle& o : obstacles.obstacles()) {
    const bool hit = tree.query(o.bounds(), [&](int t) { return triangle_hits(strip, t, o); });
    if (hit) return true;
  }
  return enclosed_obstacle(strip, obstacles);
}

bool strip_collides_exhaustive(const TriangulatedStrip& strip, const ObstacleSet& obstacles) {
  for (const Obstacle& o : obstacles.obstacles())
    for (std::size_t t = 0; t < strip.triangles.size(); ++t)
      if (triangle_hits(strip, t, o)) return true;
  return enclosed_obstacle(strip, obstacles);
}

bool point_inside_closed_mesh(const Vec& p, std::span<const Vec> vertices,
                              std::span<const std::array<int, 3>> triangles) {
  // Direction chosen off any axis or diagonal so grazing hits are unlikely.
  const Vec dir = normalized(Vec{0.5773, 0.6181, 0.5331});
  int crossings = 0;
  for (const auto& f : triangles) {
    const Vec& a = vertices[f[0]];
    const Vec e1 = vertices[f[1]] - a;
    const Vec e2 = vertices[f[2]] - a;
    const Vec h = cross(dir, e2);
    const double det = dot(e1, h);
    if (std::fabs(det) < 1e-15) continue;
    const double inv = 1.0 / det;
    const Vec s = p - a;
    const double u = inv * dot(s, h);
    if (u < 0.0 || u > 1.0) continue;
    const Vec q = cross(s, e1);
    const double v = inv * dot(dir, q);
    if (v < 0.0 || u + v > 1.0) continue;
    if (inv * dot(e2, q) > 0.0) ++crossings;
  }
  return crossings % 2 == 1;
}

// ---------------------------------------------------------------------------
// Barycentric coordinates

Outcome<std::array<double, 3>> barycentric(const Vec& a, const Vec& b, const Vec& c, const Vec& p) {
  const Vec e0 = b - a;
  const Vec e1 = c - a;
  const Vec ep = p - a;
  const double area = 0.5 * norm(cross(e0, e1));
  const double scale = std::fmax(squared_norm(e0), squared_norm(e1));
  if (!(area > 1e-12 * scale) || area < 1e-300)
    return make_error(ErrorCode::kDegenerate, "triangle area below tolerance");
  const double d00 = dot(e0, e0);
  const double d01 = dot(e0, e1);
  const double d11 = dot(e1, e1);
  const double d20 = dot(ep, e0);
  const double d21 = dot(ep, e1);
  const double denom = d00 * d11 - d01 * d01;
  const double v = (d11 * d20 - d01 * d21) / denom;
  const double w = (d00 * d21 - d01 * d20) / denom;
  return std::array<double, 3>{1.0 - v - w, v, w};
}

bool point_in_triangle(const Vec& a, const Vec& b, const Vec& c, const Vec& p, double eps) {
  const Vec tri[3] = {a, b, c};
  const Vec pt[1] = {p};
  return convex_distance(tri, pt) <= eps;
}

}  // namespace bridgenav
