#include "bridgenav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bridgenav {

double AgentLimits::axis_speed() const { return v_max / std::sqrt(static_cast<double>(dimension)); }
double AgentLimits::axis_accel() const { return a_max / std::sqrt(static_cast<double>(dimension)); }
bool AgentLimits::valid() const {
  return radius > 0.0 && v_max > 0.0 && a_max > 0.0 && dimension >= 1 && dimension <= 3 &&
         std::isfinite(radius) && std::isfinite(v_max) && std::isfinite(a_max);
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory Trajectory::at_rest(const Vec& p, double dt) {
  Trajectory t(dt);
  t.push({p, {}, {}});
  return t;
}

std::vector<Vec> Trajectory::positions() const {
  std::vector<Vec> out;
  out.reserve(wps_.size());
  for (const auto& w : wps_) out.push_back(w.p);
  return out;
}

void Trajectory::push_step(const Vec& a) {
  Waypoint& last = wps_.back();
  last.a = a;
  const State next = integrate_step({last.p, last.v}, a, dt_);
  wps_.push_back({next.p, next.v, {}});
}

State Trajectory::state_at(double t) const {
  if (wps_.empty()) return {};
  if (t <= 0.0) return start_state();
  if (t >= duration()) return end_state();
  const auto i = std::min(static_cast<std::size_t>(t / dt_), wps_.size() - 2);
  const double tau = t - static_cast<double>(i) * dt_;
  const Waypoint& w = wps_[i];
  return {w.p + w.v * tau + w.a * (0.5 * tau * tau), w.v + w.a * tau};
}

void Trajectory::append(const Trajectory& next) {
  if (next.empty()) return;
  if (wps_.empty()) {
    wps_ = next.wps_;
    return;
  }
  wps_.back().a = next.front().a;
  wps_.insert(wps_.end(), next.wps_.begin() + 1, next.wps_.end());
}

State integrate_step(const State& s, const Vec& a, double dt) {
  return {s.p + s.v * dt + a * (0.5 * dt * dt), s.v + a * dt};
}

// ---------------------------------------------------------------------------
// Per-axis profiles

namespace {

// Velocity at time t of the profile that ramps from v0 toward the peak vp,
// then ramps to v1 at T, with ramps of slope `accel`.
double profile_velocity(double v0, double v1, double vp, double accel, double horizon, double t) {
  const double inner = std::clamp(vp, v0 - accel * t, v0 + accel * t);
  const double rem = horizon - t;
  return std::clamp(inner, v1 - accel * rem, v1 + accel * rem);
}

// Continuous displacement of the profile; vp must be reachable
// (|vp - v0| + |vp - v1| <= accel * horizon).
double profile_area(double v0, double v1, double vp, double accel, double horizon) {
  if (accel <= 0.0) return v0 * horizon;
  const double t1 = std::fabs(vp - v0) / accel;
  const double t2 = std::fabs(vp - v1) / accel;
  const double cruise = std::max(0.0, horizon - t1 - t2);
  return 0.5 * (v0 + vp) * t1 + vp * cruise + 0.5 * (vp + v1) * t2;
}

struct AxisRequest {
  double delta;
  double v0;
  double v1;
};

struct PeakRange {
  double lo;
  double hi;
};

PeakRange peak_range(const AxisRequest& r, double accel, double vcap, double horizon) {
  return {std::max(-vcap, 0.5 * (r.v0 + r.v1 - accel * horizon)),
          std::min(vcap, 0.5 * (r.v0 + r.v1 + accel * horizon))};
}

bool continuous_feasible(const AxisRequest& r, double accel, double vcap, double horizon) {
  if (std::fabs(r.v1 - r.v0) > accel * horizon * (1.0 + 1e-12) + 1e-15) return false;
  const PeakRange pr = peak_range(r, accel, vcap, horizon);
  const double tol = 1e-12 * (1.0 + std::fabs(r.delta));
  return profile_area(r.v0, r.v1, pr.lo, accel, horizon) <= r.delta + tol &&
         r.delta - tol <= profile_area(r.v0, r.v1, pr.hi, accel, horizon);
}

double discrete_area(const AxisRequest& r, double vp, double accel, int steps, double dt) {
  const double horizon = steps * dt;
  double sum = 0.0;
  double prev = r.v0;
  for (int i = 1; i <= steps; ++i) {
    const double v = i == steps ? r.v1 : profile_velocity(r.v0, r.v1, vp, accel, horizon, i * dt);
    sum += 0.5 * (prev + v);
    prev = v;
  }
  return sum * dt;
}

bool discrete_feasible(const AxisRequest& r, double accel, double vcap, int steps, double dt) {
  if (std::fabs(r.v1 - r.v0) > accel * steps * dt * (1.0 + 1e-12) + 1e-15) return false;
  const PeakRange pr = peak_range(r, accel, vcap, steps * dt);
  const double tol = 1e-12 * (1.0 + std::fabs(r.delta));
  return discrete_area(r, pr.lo, accel, steps, dt) <= r.delta + tol &&
         r.delta - tol <= discrete_area(r, pr.hi, accel, steps, dt);
}

// Velocity samples 0..steps of the axis profile matching r.delta.
std::vector<double> axis_samples(const AxisRequest& r, double accel, double vcap, int steps, double dt) {
  const double horizon = steps * dt;
  const PeakRange pr = peak_range(r, accel, vcap, horizon);
  double lo = pr.lo;
  double hi = pr.hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (discrete_area(r, mid, accel, steps, dt) < r.delta)
      lo = mid;
    else
      hi = mid;
  }
  const double vp = 0.5 * (lo + hi);
  std::vector<double> v(static_cast<std::size_t>(steps) + 1);
  v[0] = r.v0;
  for (int i = 1; i < steps; ++i) v[i] = profile_velocity(r.v0, r.v1, vp, accel, horizon, i * dt);
  v[steps] = r.v1;
  return v;
}

// Smallest slope in [needed, amax] whose profile family can realize the
// request within `steps`; amax when nothing smaller fits.
double minimal_accel(const AxisRequest& r, double amax, double vcap, int steps, double dt) {
  const double horizon = steps * dt;
  double lo = std::fabs(r.v1 - r.v0) / horizon;
  double hi = amax;
  if (lo >= hi) return amax;
  if (continuous_feasible(r, lo, vcap, horizon)) {
    hi = lo;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (continuous_feasible(r, mid, vcap, horizon))
        hi = mid;
      else
        lo = mid;
    }
  }
  double accel = std::min(amax, hi * (1.0 + 1e-6) + 1e-12);
  if (!discrete_feasible(r, accel, vcap, steps, dt)) accel = amax;
  return accel;
}

// Straight constant-acceleration segment from v_from to v_to over whole
// steps at magnitude at most a_max.
int ramp_steps(const Vec& v_from, const Vec& v_to, double a_max, double dt) {
  const double dv = norm(v_to - v_from);
  return static_cast<int>(std::ceil(dv / (a_max * dt) - 1e-9));
}

// Velocity scaled down along its own direction until it fits the per-axis box.
Vec fit_box(const Vec& v, double vcap) {
  const double m = inf_norm(v);
  return m > vcap ? v * (vcap / m) : v;
}

}  // namespace

std::optional<std::vector<double>> axis_profile(double delta, double v0, double v1, double accel, double vcap,
                                                int steps, double dt) {
  if (steps <= 0) {
    if (std::fabs(delta) <= 1e-12 && v0 == v1) return std::vector<double>{v0};
    return std::nullopt;
  }
  const AxisRequest r{delta, v0, v1};
  if (!discrete_feasible(r, accel, vcap, steps, dt)) return std::nullopt;
  return axis_samples(r, accel, vcap, steps, dt);
}

std::optional<std::pair<double, double>> axis_reach(double v0, double v1, double accel, double vcap, int steps,
                                                    double dt) {
  if (steps <= 0) {
    if (v0 != v1) return std::nullopt;
    return std::pair{0.0, 0.0};
  }
  if (std::fabs(v1 - v0) > accel * steps * dt * (1.0 + 1e-12) + 1e-15) return std::nullopt;
  const AxisRequest r{0.0, v0, v1};
  const PeakRange pr = peak_range(r, accel, vcap, steps * dt);
  return std::pair{discrete_area(r, pr.lo, accel, steps, dt), discrete_area(r, pr.hi, accel, steps, dt)};
}

double axis_rest_to_rest_time(double distance, const AgentLimits& limits) {
  const double d = std::fabs(distance);
  const double vc = limits.axis_speed();
  const double ac = limits.axis_accel();
  if (d <= vc * vc / ac) return 2.0 * std::sqrt(d / ac);
  return d / vc + vc / ac;
}

double travel_time(const Vec& from, const Vec& to, const AgentLimits& limits) {
  double t = 0.0;
  for (int k = 0; k < limits.dimension; ++k)
    t = std::max(t, axis_rest_to_rest_time(from[k] - to[k], limits));
  return t;
}

Outcome<Trajectory> optimal_connect(const State& from, const State& to, const AgentLimits& limits, double dt) {
  if (!(dt > 0.0) || !limits.valid())
    return make_error(ErrorCode::kInvalidInput, "optimal_connect: bad dt or limits");
  if (!is_finite(from.p) || !is_finite(from.v) || !is_finite(to.p) || !is_finite(to.v))
    return make_error(ErrorCode::kInvalidInput, "optimal_connect: non-finite state");
  const double vmax_tol = limits.v_max * (1.0 + kDynEps);
  if (norm(from.v) > vmax_tol || norm(to.v) > vmax_tol)
    return make_error(ErrorCode::kUnreachable, "optimal_connect: boundary speed exceeds v_max");

  const int dim = limits.dimension;
  const double vc = limits.axis_speed();
  const double ac = limits.axis_accel();

  Trajectory out(dt);
  out.push({from.p, from.v, {}});

  // Braking prefix.
  const Vec w0 = fit_box(from.v, vc);
  if (!(w0 == from.v)) {
    const int n = ramp_steps(from.v, w0, limits.a_max, dt);
    const Vec a = (w0 - from.v) / (n * dt);
    for (int i = 0; i < n; ++i) out.push_step(a);
    out.waypoints().back().v = w0;
  }

  // Launching suffix, planned backward from the goal.
  const Vec w1 = fit_box(to.v, vc);
  int launch_steps = 0;
  Vec launch_accel;
  Vec q1 = to.p;
  if (!(w1 == to.v)) {
    launch_steps = ramp_steps(w1, to.v, limits.a_max, dt);
    launch_accel = (to.v - w1) / (launch_steps * dt);
    q1 = to.p - (w1 + to.v) * (0.5 * launch_steps * dt);
  }

  const Vec q0 = out.back().p;
  AxisRequest req[3];
  bool all_rest = true;
  double lower = 0.0;
  for (int k = 0; k < dim; ++k) {
    req[k] = {q1[k] - q0[k], w0[k], w1[k]};
    if (w0[k] != 0.0 || w1[k] != 0.0) all_rest = false;
    lower = std::max(lower, std::fabs(w1[k] - w0[k]) / ac);
  }

  bool trivial = true;
  for (int k = 0; k < dim; ++k)
    if (std::fabs(req[k].delta) > 1e-12 * (1.0 + inf_norm(q0)) || req[k].v0 != req[k].v1) trivial = false;

  int steps = 0;
  if (!trivial) {
    // Brake every axis, move rest to rest, launch: always feasible.
    double bound = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double stop = (w0[k] * w0[k] + w1[k] * w1[k]) / (2.0 * ac);
      const double d = std::fabs(req[k].delta) + stop;
      bound = std::max(bound, (std::fabs(w0[k]) + std::fabs(w1[k])) / ac + d / vc + 2.0 * std::sqrt(d / ac));
    }
    const long first = std::max(1L, static_cast<long>(std::ceil(lower / dt - 1e-9)));
    const long last = first + static_cast<long>(std::ceil(std::min(2.0 * bound / dt, 1e8))) + 16;
    steps = -1;
    for (long n = first; n <= last; ++n) {
      bool ok = true;
      for (int k = 0; k < dim && ok; ++k) ok = continuous_feasible(req[k], ac, vc, n * dt);
      for (int k = 0; k < dim && ok; ++k) ok = discrete_feasible(req[k], ac, vc, static_cast<int>(n), dt);
      if (ok) {
        steps = static_cast<int>(n);
        break;
      }
    }
    if (steps < 0) return make_error(ErrorCode::kUnreachable, "optimal_connect: no feasible duration");
  }

  if (steps > 0) {
    std::vector<double> vel[3];
    if (all_rest) {
      int lead = 0;
      for (int k = 1; k < dim; ++k)
        if (std::fabs(req[k].delta) > std::fabs(req[lead].delta)) lead = k;
      const double span = std::fabs(req[lead].delta);
      const std::vector<double> base = axis_samples({span, 0.0, 0.0}, ac, vc, steps, dt);
      for (int k = 0; k < dim; ++k) {
        const double s = req[k].delta / span;
        vel[k].resize(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) vel[k][i] = base[i] * s;
      }
    } else {
      for (int k = 0; k < dim; ++k) {
        const double accel = minimal_accel(req[k], ac, vc, steps, dt);
        vel[k] = axis_samples(req[k], accel, vc, steps, dt);
      }
    }
    for (int i = 0; i < steps; ++i) {
      Vec a;
      for (int k = 0; k < dim; ++k) a[k] = (vel[k][i + 1] - vel[k][i]) / dt;
      out.push_step(a);
      Vec& v = out.waypoints().back().v;
      for (int k = 0; k < dim; ++k) v[k] = vel[k][i + 1];
    }
  }

  for (int i = 0; i < launch_steps; ++i) out.push_step(launch_accel);
  out.waypoints().back().v = to.v;
  out.waypoints().back().a = {};

  const double pos_err = distance(out.back().p, to.p);
  if (pos_err > 1e-6 * (1.0 + inf_norm(to.p)))
    return make_error(ErrorCode::kUnreachable, "optimal_connect: terminal position mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kSpeed: return "speed";
    case Violation::Kind::kAcceleration: return "acceleration";
    case Violation::Kind::kPositionIdentity: return "position-identity";
    case Violation::Kind::kVelocityIdentity: return "velocity-identity";
  }
  return "unknown";
}

std::vector<Violation> validate_trajectory(const Trajectory& t, const AgentLimits& limits) {
  std::vector<Violation> out;
  const double vtol = limits.v_max * (1.0 + kDynEps);
  const double atol = limits.a_max * (1.0 + kDynEps);
  const double dt = t.dt();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Waypoint& w = t[i];
    if (i > 0) {
      const Waypoint& prev = t[i - 1];
      const State pred = integrate_step({prev.p, prev.v}, prev.a, dt);
      const double pe = distance(pred.p, w.p);
      const double ve = distance(pred.v, w.v);
      if (pe > kDynEps * (1.0 + 1e-3 * inf_norm(w.p)))
        out.push_back({i, Violation::Kind::kPositionIdentity, pe});
      if (ve > kDynEps * limits.v_max) out.push_back({i, Violation::Kind::kVelocityIdentity, ve});
    }
    const double speed = norm(w.v);
    if (speed > vtol || !std::isfinite(speed)) out.push_back({i, Violation::Kind::kSpeed, speed - limits.v_max});
    if (i + 1 < t.size()) {
      const double acc = norm(w.a);
      if (acc > atol || !std::isfinite(acc))
        out.push_back({i, Violation::Kind::kAcceleration, acc - limits.a_max});
    }
  }
  return out;
}

Trajectory resample(const Trajectory& t, double dt) {
  Trajectory out(dt);
  if (t.empty()) return out;
  const auto steps = static_cast<std::size_t>(std::ceil(t.duration() / dt - 1e-9));
  std::vector<Vec> p(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) p[i] = t.state_at(std::min(t.duration(), i * dt)).p;
  Vec v = t.front().v;
  out.push({p[0], v, {}});
  for (std::size_t i = 0; i < steps; ++i) {
    const Vec a = (p[i + 1] - p[i] - v * dt) * (2.0 / (dt * dt));
    out.waypoints().back().a = a;
    v = v + a * dt;
    out.push({p[i + 1], v, {}});
  }
  return out;
}

}  // namespace bridgenav
