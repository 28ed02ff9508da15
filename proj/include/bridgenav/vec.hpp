#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace bridgenav {

// Workspace vector. 2D quantities keep z == 0.
struct Vec {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec() = default;
  constexpr Vec(double x_, double y_, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec& operator+=(const Vec& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec& operator-=(const Vec& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend constexpr Vec operator-(const Vec& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr Vec operator/(const Vec& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(const Vec& a, const Vec& b) = default;
};

constexpr double dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec cross(const Vec& a, const Vec& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double squared_norm(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec& a, const Vec& b) { return norm(a - b); }
inline double inf_norm(const Vec& a) {
  return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}
inline bool is_finite(const Vec& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Unit vector, or zero when |a| is below tiny.
inline Vec normalized(const Vec& a, double tiny = 1e-300) {
  const double n = norm(a);
  return n > tiny ? a / n : Vec{};
}

// Rotates a 2D vector by +90 degrees.
constexpr Vec perp2(const Vec& a) { return {-a.y, a.x, 0.0}; }

// Any unit vector orthogonal to the unit vector n.
inline Vec any_orthogonal(const Vec& n) {
  const Vec helper = std::fabs(n.x) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
  return normalized(cross(n, helper));
}

struct Aabb {
  Vec lo{1e300, 1e300, 1e300};
  Vec hi{-1e300, -1e300, -1e300};

  bool empty() const { return lo.x > hi.x; }
  void extend(const Vec& p) {
    lo = {std::fmin(lo.x, p.x), std::fmin(lo.y, p.y), std::fmin(lo.z, p.z)};
    hi = {std::fmax(hi.x, p.x), std::fmax(hi.y, p.y), std::fmax(hi.z, p.z)};
  }
  void extend(const Aabb& b) {
    if (b.empty()) return;
    extend(b.lo);
    extend(b.hi);
  }
  Aabb inflated(double r) const {
    if (empty()) return *this;
    return {lo - Vec{r, r, r}, hi + Vec{r, r, r}};
  }
  Vec center() const { return (lo + hi) * 0.5; }
  bool contains(const Vec& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  friend bool operator==(const Aabb&, const Aabb&) = default;
};

inline bool overlaps(const Aabb& a, const Aabb& b) {
  return !(a.empty() || b.empty()) && a.lo.x <= b.hi.x && b.lo.x <= a.hi.x && a.lo.y <= b.hi.y &&
         b.lo.y <= a.hi.y && a.lo.z <= b.hi.z && b.lo.z <= a.hi.z;
}

// Euclidean gap between two boxes (0 when they overlap).
inline double gap(const Aabb& a, const Aabb& b) {
  const double dx = std::fmax(0.0, std::fmax(a.lo.x - b.hi.x, b.lo.x - a.hi.x));
  const double dy = std::fmax(0.0, std::fmax(a.lo.y - b.hi.y, b.lo.y - a.hi.y));
  const double dz = std::fmax(0.0, std::fmax(a.lo.z - b.hi.z, b.lo.z - a.hi.z));
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace bridgenav
