#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bridgenav/error.hpp"
#include "bridgenav/vec.hpp"

namespace bridgenav {

// Length tolerance for degeneracy and containment tests.
inline constexpr double kGeomEps = 1e-9;

// Axis-aligned bounding volume hierarchy over an indexed set of boxes.
// Leaves hold single items; every node's box contains its subtree.
class Bvh {
 public:
  struct Node {
    Aabb box;
    std::int32_t left = -1;   // child index, or -1 for a leaf
    std::int32_t right = -1;
    std::int32_t item = -1;   // leaf payload
  };

  Bvh() = default;
  explicit Bvh(std::span<const Aabb> boxes);

  // Calls visit(item) for every leaf whose box overlaps query. Traversal stops
  // early once visit returns true; the return value reports that.
  bool query(const Aabb& query, const std::function<bool(int)>& visit) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

 private:
  int build(std::vector<int>& items, int begin, int end, std::span<const Aabb> boxes);
  std::vector<Node> nodes_;
};

// Convex obstacle. 2D: counter-clockwise polygon in the z = 0 plane.
// 3D: vertices of a closed convex mesh plus its outward-oriented faces.
// Every query treats the obstacle as its Minkowski sum with a ball of radius
// `inflation`.
struct Obstacle {
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> faces;  // empty for 2D polygons
  double inflation = 0.0;

  Aabb bounds() const;  // inflated
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

class ObstacleSet {
 public:
  ObstacleSet() = default;
  explicit ObstacleSet(std::vector<Obstacle> obstacles);

  // Copy with every obstacle's inflation replaced.
  ObstacleSet with_inflation(double inflation) const;
  // Copy with `extra` added to every obstacle's inflation.
  ObstacleSet inflated_by(double extra) const;

  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  std::size_t size() const { return obstacles_.size(); }
  bool empty() const { return obstacles_.empty(); }
  const Bvh& bvh() const { return bvh_; }

 private:
  std::vector<Obstacle> obstacles_;
  Bvh bvh_;
};

// Euclidean distance between the convex hulls of two point sets (GJK).
// Returns 0 when the hulls intersect.
double convex_distance(std::span<const Vec> a, std::span<const Vec> b);

// Distance from a convex hull of points to an obstacle's core shape
// (before inflation).
double distance_to_obstacle(std::span<const Vec> hull, const Obstacle& obstacle);

// True iff segment ab meets any inflated obstacle.
bool segment_hits_obstacles(const Vec& a, const Vec& b, const ObstacleSet& obstacles);
bool point_hits_obstacles(const Vec& p, const ObstacleSet& obstacles);

// Distance from p to the nearest inflated obstacle surface (negative inside).
// Returns +inf for an empty set.
double clearance(const Vec& p, const ObstacleSet& obstacles);

// Triangles over boundary waypoints. Vertex k * (T + 1) + i is waypoint i of
// boundary k. `closed` marks a tube with end caps.
struct TriangulatedStrip {
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> triangles;
  int boundary_count = 0;
  int waypoint_count = 0;
  bool closed = false;

  std::array<Vec, 3> triangle(std::size_t t) const {
    const auto& f = triangles[t];
    return {vertices[f[0]], vertices[f[1]], vertices[f[2]]};
  }
};

// Two boundaries: 2T triangles tiling the quad strip. K >= 3 boundaries:
// closed tube plus fan caps at both ends.
Outcome<TriangulatedStrip> triangulate_boundary(std::span<const std::vector<Vec>> boundaries);

// True iff any strip triangle meets an inflated obstacle; for closed tubes an
// obstacle fully enclosed by the tube also counts. Uses BVH traversal.
bool strip_collides(const TriangulatedStrip& strip, const ObstacleSet& obstacles);

// All-pairs reference for strip_collides.
bool strip_collides_exhaustive(const TriangulatedStrip& strip, const ObstacleSet& obstacles);

// Ray-parity test against a closed triangle mesh.
bool point_inside_closed_mesh(const Vec& p, std::span<const Vec> vertices,
                              std::span<const std::array<int, 3>> triangles);

// Barycentric coordinates (u, v, w) with u*a + v*b + w*c = p for p in the
// plane of the triangle. Fails with kDegenerate for near-zero area.
Outcome<std::array<double, 3>> barycentric(const Vec& a, const Vec& b, const Vec& c, const Vec& p);

// Point-in-triangle with tolerance `eps` on the barycentric coordinates and
// on the out-of-plane distance.
bool point_in_triangle(const Vec& a, const Vec& b, const Vec& c, const Vec& p, double eps = kGeomEps);

}  // namespace bridgenav
