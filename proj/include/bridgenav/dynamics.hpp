#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bridgenav/error.hpp"
#include "bridgenav/vec.hpp"

namespace bridgenav {

// Relative tolerance for dynamic limit checks.
inline constexpr double kDynEps = 1e-6;

struct AgentLimits {
  double radius = 1.0;
  double v_max = 1.0;
  double a_max = 1.0;
  int dimension = 2;  // 1..3; per-axis limits are v_max / sqrt(D), a_max / sqrt(D)

  double axis_speed() const;
  double axis_accel() const;
  bool valid() const;
  friend bool operator==(const AgentLimits&, const AgentLimits&) = default;
};

struct State {
  Vec p;
  Vec v;
};

struct Waypoint {
  Vec p;
  Vec v;
  Vec a;  // constant over [t_i, t_i + dt); unused on the last waypoint
};

// Uniformly sampled double-integrator trajectory. Waypoints obey
//   p[i+1] = p[i] + v[i] dt + a[i] dt^2 / 2,  v[i+1] = v[i] + a[i] dt.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(double dt) : dt_(dt) {}
  Trajectory(double dt, std::vector<Waypoint> waypoints) : dt_(dt), wps_(std::move(waypoints)) {}

  // Single resting waypoint.
  static Trajectory at_rest(const Vec& p, double dt);

  double dt() const { return dt_; }
  std::size_t size() const { return wps_.size(); }
  bool empty() const { return wps_.empty(); }
  // Number of steps T (waypoints are 0..T).
  std::size_t horizon() const { return wps_.empty() ? 0 : wps_.size() - 1; }
  double duration() const { return static_cast<double>(horizon()) * dt_; }

  const Waypoint& operator[](std::size_t i) const { return wps_[i]; }
  Waypoint& operator[](std::size_t i) { return wps_[i]; }
  const Waypoint& front() const { return wps_.front(); }
  const Waypoint& back() const { return wps_.back(); }
  const std::vector<Waypoint>& waypoints() const { return wps_; }
  std::vector<Waypoint>& waypoints() { return wps_; }

  State start_state() const { return {front().p, front().v}; }
  State end_state() const { return {back().p, back().v}; }
  std::vector<Vec> positions() const;

  // Appends one integrated step with constant acceleration a.
  void push_step(const Vec& a);
  void push(const Waypoint& w) { wps_.push_back(w); }

  // Exact state at time t in [0, duration()] (clamped outside).
  State state_at(double t) const;

  // Appends `next`, whose first waypoint must coincide with back(); the
  // shared waypoint takes next's acceleration.
  void append(const Trajectory& next);

 private:
  double dt_ = 0.0;
  std::vector<Waypoint> wps_;
};

// Kinematic update with no clamping.
State integrate_step(const State& s, const Vec& a, double dt);

// Time-optimal-style connection between two states. Each axis follows a
// bang-cruise-bang velocity profile under the per-axis limits; all axes share
// the duration of the slowest one, the others use the smallest acceleration
// that fits it (rest-to-rest requests scale proportionally and so move in a
// straight line). Boundary velocities outside the per-axis box get a straight
// braking prefix / launching suffix along their own direction. The duration
// is the smallest multiple of dt that admits such a profile.
Outcome<Trajectory> optimal_connect(const State& from, const State& to, const AgentLimits& limits, double dt);

// Rest-to-rest duration of the per-axis synchronized profile (continuous
// time). Symmetric in its arguments.
double travel_time(const Vec& from, const Vec& to, const AgentLimits& limits);

// Rest-to-rest time for a single axis covering `distance`.
double axis_rest_to_rest_time(double distance, const AgentLimits& limits);

// Single-axis bang-cruise-bang profile over exactly `steps` steps: starts at
// velocity v0, ends at v1, covers `delta`, with |accel| <= accel and
// |velocity| <= vcap. Returns velocity samples 0..steps, or nothing when the
// request does not fit.
std::optional<std::vector<double>> axis_profile(double delta, double v0, double v1, double accel, double vcap,
                                                int steps, double dt);

// Smallest and largest displacement of such profiles over `steps` steps, or
// nothing when v0 cannot reach v1 in time.
std::optional<std::pair<double, double>> axis_reach(double v0, double v1, double accel, double vcap, int steps,
                                                    double dt);

struct Violation {
  enum class Kind { kSpeed, kAcceleration, kPositionIdentity, kVelocityIdentity };
  std::size_t index;
  Kind kind;
  double excess;
};

std::string to_string(Violation::Kind kind);

// Every waypoint violating the speed / acceleration bounds (relative kDynEps)
// or the integration identity. Identity violations are reported at the index
// whose stored value disagrees with the prediction from its predecessor.
std::vector<Violation> validate_trajectory(const Trajectory& t, const AgentLimits& limits);

// Resamples at a new step. Positions are sampled exactly and kept; each
// step's acceleration is re-derived from the position finite difference and
// velocities are re-integrated from the first sample. Callers re-validate.
Trajectory resample(const Trajectory& t, double dt);

}  // namespace bridgenav
