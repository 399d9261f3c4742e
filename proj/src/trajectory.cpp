#include "ned/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ned/errors.hpp"

namespace ned::traj {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void DynamicLimits::validate() const {
  if (!finite_positive(v_max) || !finite_positive(a_max) || !finite_positive(j_max)) {
    throw std::invalid_argument("dynamic limits must be finite and strictly positive");
  }
}

void PerturbationSpec::validate() const {
  limits.validate();
  if (!finite_positive(amplitude_mm)) {
    throw std::invalid_argument("perturbation amplitude must be positive");
  }
  if (!(std::isfinite(plateau_ms) && plateau_ms >= 0.0)) {
    throw std::invalid_argument("plateau duration must be non-negative");
  }
}

void SegmentPath::push_node(double duration, double jerk) {
  if (nodes.empty()) nodes.push_back({0.0, 0.0, 0.0, 0.0});
  const Node& n = nodes.back();
  const double t = duration;
  Node next;
  next.t = n.t + t;
  next.x = n.x + n.v * t + 0.5 * n.a * t * t + jerk * t * t * t / 6.0;
  next.v = n.v + n.a * t + 0.5 * jerk * t * t;
  next.a = n.a + jerk * t;
  nodes.push_back(next);
}

void SegmentPath::append_segment(double duration, double jerk) {
  if (duration <= 0.0) return;
  segments.push_back({duration, jerk});
  push_node(duration, jerk);
}

void SegmentPath::append_hold(double duration) { append_segment(duration, 0.0); }

void SegmentPath::eval(double t, double& x, double& v, double& a) const {
  if (nodes.empty()) {
    x = v = a = 0.0;
    return;
  }
  t = std::clamp(t, 0.0, nodes.back().t);
  // Segment counts are tiny (a handful per stroke); linear scan is fine.
  std::size_t k = 0;
  while (k + 1 < segments.size() && t > nodes[k + 1].t) ++k;
  const Node& n = nodes[k];
  const double s = t - n.t;
  const double j = segments.empty() ? 0.0 : segments[k].jerk;
  x = n.x + n.v * s + 0.5 * n.a * s * s + j * s * s * s / 6.0;
  v = n.v + n.a * s + 0.5 * j * s * s;
  a = n.a + j * s;
}

namespace {

// Rest-to-rest 7-segment timing for a non-negative distance. Returns
// (t_j, t_a, t_v): jerk ramp, constant-acceleration and cruise durations.
void solve_scurve(double dist, const DynamicLimits& lim, double& t_j, double& t_a, double& t_v) {
  const double a = lim.a_max;
  const double j = lim.j_max;
  const double v_tri = a * a / j;  // velocity where the accel ramp saturates at a_max

  // Peak velocity if no cruise segment existed. The accel phase has a
  // constant-acceleration segment iff dist >= 2 a^3 / j^2.
  double v_p;
  if (dist >= 2.0 * a * a * a / (j * j)) {
    // dist = v^2/a + v*a/j, positive root.
    const double root = std::sqrt(v_tri * v_tri + 4.0 * a * dist);
    v_p = 0.5 * (root - v_tri);
  } else {
    v_p = std::cbrt(j * dist * dist / 4.0);  // pure jerk ramps
  }

  double t_cruise = 0.0;
  if (v_p > lim.v_max) {
    v_p = lim.v_max;
    // Distance covered by accel+decel at peak v_p; remainder cruises.
    double t_ramp, t_const;
    if (v_p >= v_tri) {
      t_ramp = a / j;
      t_const = v_p / a - a / j;
    } else {
      t_ramp = std::sqrt(v_p / j);
      t_const = 0.0;
    }
    const double d_ad = v_p * (2.0 * t_ramp + t_const);
    t_cruise = (dist - d_ad) / v_p;
    if (t_cruise < 0.0) t_cruise = 0.0;  // roundoff guard; analytic value is >= 0 here
    t_j = t_ramp;
    t_a = t_const;
  } else if (v_p >= v_tri) {
    t_j = a / j;
    t_a = v_p / a - a / j;
    if (t_a < 0.0) t_a = 0.0;
  } else {
    t_j = std::sqrt(v_p / j);
    t_a = 0.0;
  }
  t_v = t_cruise;
}

}  // namespace

void SegmentPath::append_move(double dist, const DynamicLimits& limits) {
  limits.validate();
  if (!std::isfinite(dist)) throw std::invalid_argument("move distance must be finite");
  if (dist == 0.0) return;

  const double sgn = dist > 0.0 ? 1.0 : -1.0;
  double t_j, t_a, t_v;
  solve_scurve(std::abs(dist), limits, t_j, t_a, t_v);

  const double j = sgn * limits.j_max;
  const double x_before = end_position();
  append_segment(t_j, j);
  append_segment(t_a, 0.0);
  append_segment(t_j, -j);
  append_segment(t_v, 0.0);
  append_segment(t_j, -j);
  append_segment(t_a, 0.0);
  append_segment(t_j, j);

  // The timing solution is exact; snap away the residual float error so the
  // endpoint and any later plateau samples are bit-stable.
  Node& end = nodes.back();
  const double target = x_before + dist;
  if (std::abs(end.x - target) > 1e-6 * std::max(1.0, std::abs(dist))) {
    throw std::runtime_error("s-curve distance closure failed");
  }
  end.x = target;
  end.v = 0.0;
  end.a = 0.0;
}

SegmentPath fastest_move_path(double distance, const DynamicLimits& limits) {
  SegmentPath path;
  path.append_move(distance, limits);
  return path;
}

TrajectoryProfile sample_path(const SegmentPath& path, double x0) {
  if (!std::isfinite(x0)) throw std::invalid_argument("start position must be finite");
  TrajectoryProfile p;
  const double total = path.total_time();
  if (total <= 0.0) {
    p.positions = {x0};
    p.velocities = {0.0};
    p.accelerations = {0.0};
    return p;
  }
  const double dt = kSamplePeriod;
  const auto core = static_cast<std::size_t>(std::ceil(total / dt - 1e-9));
  const std::size_t n = core + 3;  // one rest pad at each end
  p.positions.resize(n);
  p.velocities.assign(n, 0.0);
  p.accelerations.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x, v, a;
    path.eval((static_cast<double>(i) - 1.0) * dt, x, v, a);
    p.positions[i] = x0 + x;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    p.velocities[i] = (p.positions[i + 1] - p.positions[i - 1]) / (2.0 * dt);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    p.accelerations[i] = (p.velocities[i + 1] - p.velocities[i - 1]) / (2.0 * dt);
  }
  return p;
}

TrajectoryProfile plan_fastest_move(double x0, double x1, const DynamicLimits& limits) {
  if (!std::isfinite(x0) || !std::isfinite(x1)) {
    throw std::invalid_argument("positions must be finite");
  }
  limits.validate();
  return sample_path(fastest_move_path(x1 - x0, limits), x0);
}

void append_ramp_hold(SegmentPath& path, double signed_amplitude_mm, double plateau_s,
                      const DynamicLimits& limits) {
  path.append_move(signed_amplitude_mm, limits);
  // Snap the plateau start onto the sample grid, then hold for one sample
  // less than the nominal count: the arrival sample is already at the
  // plateau value, so the run length comes out at exactly round(D/dt).
  const double h = kSamplePeriod;
  const double t_arrive = path.total_time();
  const double snap = std::ceil(t_arrive / h - 1e-9) * h - t_arrive;
  if (snap > 1e-12) path.append_hold(snap);
  const double n_hold = std::max(std::round(plateau_s / h), 1.0) - 1.0;
  path.append_hold(n_hold * h);
  path.append_move(-signed_amplitude_mm, limits);
}

TrajectoryProfile plan_ramp_hold(const PerturbationSpec& spec, double x0) {
  spec.validate();
  const double sgn = spec.direction == Direction::flexion ? 1.0 : -1.0;
  SegmentPath path;
  append_ramp_hold(path, sgn * spec.amplitude_mm, spec.plateau_ms * 1e-3, spec.limits);
  return sample_path(path, x0);
}

TrajectoryProfile plan_saw(double amplitude, double speed, int cycles, const DynamicLimits& limits) {
  limits.validate();
  if (!finite_positive(amplitude)) throw std::invalid_argument("saw amplitude must be positive");
  if (!finite_positive(speed)) throw std::invalid_argument("saw speed must be positive");
  if (cycles < 0) throw std::invalid_argument("cycle count must be non-negative");
  if (speed > limits.v_max) throw std::invalid_argument("saw speed exceeds the velocity limit");

  DynamicLimits stroke = limits;
  stroke.v_max = speed;  // commanded constant stroke speed

  SegmentPath path;
  for (int c = 0; c < cycles; ++c) {
    path.append_move(amplitude, stroke);
    path.append_move(-2.0 * amplitude, stroke);
    path.append_move(amplitude, stroke);
  }
  return sample_path(path, 0.0);
}

std::pair<std::size_t, std::size_t> plateau_range(const TrajectoryProfile& profile) {
  const auto& x = profile.positions;
  if (x.empty()) return {0, 0};
  const double x0 = x.front();
  std::size_t peak = 0;
  double dev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - x0);
    if (d > dev) {
      dev = d;
      peak = i;
    }
  }
  if (dev == 0.0) return {0, 0};
  const double value = x[peak];
  const double tol = 1e-9 * std::max(1.0, std::abs(value));
  std::size_t b = peak, e = peak + 1;
  while (b > 0 && std::abs(x[b - 1] - value) <= tol) --b;
  while (e < x.size() && std::abs(x[e] - value) <= tol) ++e;
  return {b, e};
}

std::string validate_profile(const TrajectoryProfile& p, const DynamicLimits& limits) {
  const std::size_t n = p.size();
  if (n == 0) return "profile is empty";
  if (p.velocities.size() != n || p.accelerations.size() != n) return "channel lengths differ";
  if (p.dt != kSamplePeriod) return "sample period is not 1 ms";
  if (p.velocities.front() != 0.0 || p.velocities.back() != 0.0) return "end velocities not zero";
  if (p.accelerations.front() != 0.0 || p.accelerations.back() != 0.0) return "end accelerations not zero";

  const double vtol = limits.v_max * (1.0 + 1e-9);
  const double atol = limits.a_max * (1.0 + 1e-9);
  const double jtol = limits.j_max * (1.0 + 1e-6);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.positions[i])) return "non-finite position";
    if (std::abs(p.velocities[i]) > vtol) return "velocity limit violated";
    if (std::abs(p.accelerations[i]) > atol) return "acceleration limit violated";
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(p.accelerations[i + 1] - p.accelerations[i]) / p.dt > jtol) {
      return "jerk limit violated";
    }
  }

  // Centered differences must reproduce the stored derivative channels.
  double err_v = 0.0, ref_v = 0.0, err_a = 0.0, ref_a = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double vfd = (p.positions[i + 1] - p.positions[i - 1]) / (2.0 * p.dt);
    const double afd = (p.velocities[i + 1] - p.velocities[i - 1]) / (2.0 * p.dt);
    err_v += (vfd - p.velocities[i]) * (vfd - p.velocities[i]);
    ref_v += p.velocities[i] * p.velocities[i];
    err_a += (afd - p.accelerations[i]) * (afd - p.accelerations[i]);
    ref_a += p.accelerations[i] * p.accelerations[i];
  }
  if (ref_v > 0.0 && std::sqrt(err_v / ref_v) > 1e-3) return "velocity differencing mismatch";
  if (ref_a > 0.0 && std::sqrt(err_a / ref_a) > 1e-3) return "acceleration differencing mismatch";
  return {};
}

}  // namespace ned::traj
