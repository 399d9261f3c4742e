#include "ned/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ned/errors.hpp"

namespace ned::geom {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vec2 rotate(Vec2 p, double ang) {
  const double c = std::cos(ang), s = std::sin(ang);
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}
}  // namespace

void RigConfig::validate() const {
  if (!(leg_length_m >= 0.5 && leg_length_m <= 1.2)) {
    throw std::invalid_argument("leg length must lie in [0.5, 1.2] m");
  }
  if (!(hip_angle_deg >= 0.0 && hip_angle_deg <= 90.0)) {
    throw std::invalid_argument("hip angle must lie in [0, 90] deg");
  }
  for (const Vec2& p : {front_pulley, rear_pulley}) {
    if (std::abs(p.x) > 3.0 || std::abs(p.y) > 1.5) {
      throw std::invalid_argument("pulley outside the rail envelope");
    }
  }
  if (!(motor_pulley_radius_m > 0.0)) throw std::invalid_argument("pulley radius must be > 0");
}

Vec2 RigConfig::foot() const {
  const double a = hip_angle_deg * kDeg;
  return {leg_length_m * std::sin(a), -leg_length_m * std::cos(a)};
}

double RigConfig::front_run() const { return dist(foot(), front_pulley); }
double RigConfig::rear_run() const { return dist(foot(), rear_pulley); }

double motor_to_joint(double dtheta_motor_rad, const RigConfig& rig) {
  rig.validate();
  return rig.motor_pulley_radius_m / rig.leg_length_m * dtheta_motor_rad;
}

double off_plane_error(double x_u_m, double span_front_m, double span_rear_m) {
  if (!(span_front_m > 0.0) || !(span_rear_m > 0.0)) {
    throw std::invalid_argument("spans must be > 0");
  }
  const double xu = std::abs(x_u_m);
  const double theta1 = std::atan(xu / span_front_m);
  const double theta2 = std::atan(xu / span_rear_m);
  return 1.0 - std::min(std::cos(theta1), std::cos(theta2));
}

namespace {

double rotation_error_at(double leg, double delta, Vec2 f0, Vec2 front, Vec2 rear) {
  if (delta == 0.0) return 0.0;
  (void)leg;
  const Vec2 f1 = rotate(f0, delta);
  double cos_sum = 0.0;
  for (const Vec2& pulley : {front, rear}) {
    const Vec2 ideal = rotate(pulley, delta);  // pulley co-rotated with the leg
    const double l_run = dist(f1, pulley);
    const double l_ideal = dist(f1, ideal);
    const double gap = dist(pulley, ideal);
    const double denom = 2.0 * l_run * l_ideal;
    if (denom <= 0.0) throw DegenerateGeometry("cable run collapsed");
    const double cos_theta = (l_run * l_run + l_ideal * l_ideal - gap * gap) / denom;
    if (cos_theta < -1.0 - 1e-12 || cos_theta > 1.0 + 1e-12) {
      throw DegenerateGeometry("law-of-cosines argument outside [-1, 1]");
    }
    cos_sum += std::clamp(cos_theta, -1.0, 1.0);
  }
  return 1.0 - 0.5 * cos_sum;
}

}  // namespace

double rotation_error(double displacement_m, const RigConfig& rig) {
  rig.validate();
  const double delta = displacement_m / rig.leg_length_m;  // hip rotation, rad
  return rotation_error_at(rig.leg_length_m, delta, rig.foot(), rig.front_pulley, rig.rear_pulley);
}

namespace {

// Largest x with err(x) <= budget, bisected to 1 mm after a coarse bracket.
template <typename Err>
double admissible_displacement(Err err, double budget, double hi_limit) {
  double lo = 0.0, hi = hi_limit;
  if (err(hi) <= budget) return hi;
  for (int it = 0; it < 60 && hi - lo > 1e-4; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (err(mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

RigConfig make_rig(double leg, double hip_deg, double front_run, double rear_run) {
  RigConfig rig;
  rig.leg_length_m = leg;
  rig.hip_angle_deg = hip_deg;
  const double a = hip_deg * kDeg;
  const Vec2 foot{leg * std::sin(a), -leg * std::cos(a)};
  const Vec2 perp{std::cos(a), std::sin(a)};
  rig.front_pulley = {foot.x + front_run * perp.x, foot.y + front_run * perp.y};
  rig.rear_pulley = {foot.x - rear_run * perp.x, foot.y - rear_run * perp.y};
  // Keep synthesized rigs inside the rail envelope for validate().
  rig.front_pulley.x = std::clamp(rig.front_pulley.x, -3.0, 3.0);
  rig.front_pulley.y = std::clamp(rig.front_pulley.y, -1.5, 1.5);
  rig.rear_pulley.x = std::clamp(rig.rear_pulley.x, -3.0, 3.0);
  rig.rear_pulley.y = std::clamp(rig.rear_pulley.y, -1.5, 1.5);
  return rig;
}

template <typename PerConfig>
SensitivityResult sweep(double budget, std::array<double, 2> leg_range,
                        std::array<double, 2> hip_range,
                        std::array<std::array<double, 2>, 2> pulley_ranges, PerConfig per_config) {
  if (!(budget > 0.0 && budget < 1.0)) throw std::invalid_argument("budget must lie in (0, 1)");
  if (!(leg_range[1] >= leg_range[0]) || !(hip_range[1] >= hip_range[0]) ||
      !(pulley_ranges[0][1] >= pulley_ranges[0][0]) || !(pulley_ranges[1][1] >= pulley_ranges[1][0])) {
    throw std::invalid_argument("empty search range");
  }

  SensitivityResult best;
  best.max_displacement_cm = 1e9;
  bool any = false;
  for (double leg = leg_range[0]; leg <= leg_range[1] + 1e-9; leg += 0.01) {
    for (double hip = hip_range[0]; hip <= hip_range[1] + 1e-9; hip += 1.0) {
      for (double fr = pulley_ranges[0][0]; fr <= pulley_ranges[0][1] + 1e-9; fr += 0.01) {
        for (double rr = pulley_ranges[1][0]; rr <= pulley_ranges[1][1] + 1e-9; rr += 0.01) {
          const double x = per_config(leg, hip, fr, rr, budget);
          if (x < best.max_displacement_cm) {
            best.max_displacement_cm = x;
            best.worst_case_config = make_rig(leg, hip, fr, rr);
            any = true;
          }
        }
      }
    }
  }
  if (!any) throw std::invalid_argument("empty grid");
  best.worst_error = budget;
  best.max_displacement_cm *= 100.0;
  return best;
}

}  // namespace

SensitivityResult max_sideway_displacement(double error_budget, std::array<double, 2> leg_range_m,
                                           std::array<double, 2> hip_range_deg,
                                           std::array<std::array<double, 2>, 2> pulley_ranges_m) {
  // The off-plane error depends on the free spans alone; the leg and hip
  // grids locate the worst posture bookkeeping-wise but cannot change the
  // admissible displacement, so they are collapsed to their range midpoints.
  const double leg_mid = 0.5 * (leg_range_m[0] + leg_range_m[1]);
  const double hip_mid = 0.5 * (hip_range_deg[0] + hip_range_deg[1]);
  auto per = [](double /*leg*/, double /*hip*/, double fr, double rr, double budget) {
    const double f = std::max(fr - kCellOffsetM, 1e-3);
    const double r = std::max(rr - kCellOffsetM, 1e-3);
    return admissible_displacement([&](double x) { return off_plane_error(x, f, r); }, budget, 2.0);
  };
  return sweep(error_budget, {leg_mid, leg_mid}, {hip_mid, hip_mid}, pulley_ranges_m, per);
}

SensitivityResult max_rotation_displacement(double error_budget, std::array<double, 2> leg_range_m,
                                            std::array<double, 2> hip_range_deg,
                                            std::array<std::array<double, 2>, 2> pulley_ranges_m) {
  // The perpendicular construction rotates rigidly with the hip angle, so the
  // error is hip-invariant; collapse that axis to keep the sweep fast.
  const double hip_mid = 0.5 * (hip_range_deg[0] + hip_range_deg[1]);
  auto per = [](double leg, double hip, double fr, double rr, double budget) {
    const double a = hip * kDeg;
    const Vec2 foot{leg * std::sin(a), -leg * std::cos(a)};
    const Vec2 perp{std::cos(a), std::sin(a)};
    const double f = std::max(fr - kCellOffsetM, 1e-3);
    const double r = std::max(rr - kCellOffsetM, 1e-3);
    const Vec2 front{foot.x + f * perp.x, foot.y + f * perp.y};
    const Vec2 rear{foot.x - r * perp.x, foot.y - r * perp.y};
    auto err = [&](double x) { return rotation_error_at(leg, x / leg, foot, front, rear); };
    return admissible_displacement(err, budget, 0.45 * leg * kPi);
  };
  return sweep(error_budget, leg_range_m, {hip_mid, hip_mid}, pulley_ranges_m, per);
}

CapstanResult capstan_min_turns(double t_load_n, double t_hold_n, double mu) {
  if (!(t_hold_n > 0.0)) throw std::invalid_argument("holding tension must be > 0");
  if (!(t_load_n >= t_hold_n)) throw std::invalid_argument("load tension must be >= holding tension");
  if (!(mu > 0.0)) throw std::invalid_argument("friction coefficient must be > 0");
  CapstanResult r;
  r.min_contact_angle_rad = std::log(t_load_n / t_hold_n) / mu;
  r.turns = r.min_contact_angle_rad / (2.0 * kPi);
  r.wraps = static_cast<int>(std::ceil(r.turns - 1e-12));
  return r;
}

double sideway_restoring_force(double x_u_m, double pretension_n, double cable_stiffness_n_m,
                               const RigConfig& rig) {
  if (x_u_m < 0.0 || !(pretension_n > 0.0) || !(cable_stiffness_n_m > 0.0)) {
    throw std::invalid_argument("inputs must be positive");
  }
  rig.validate();
  double force = 0.0;
  for (double run : {rig.front_run(), rig.rear_run()}) {
    const double stretched = std::hypot(run, x_u_m);
    const double tension = pretension_n + cable_stiffness_n_m * (stretched - run);
    force += tension * (x_u_m / stretched);
  }
  return force;
}

}  // namespace ned::geom
