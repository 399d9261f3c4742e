#include "ned/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ned/errors.hpp"
#include "ned/random.hpp"

namespace ned::plant {

namespace {
constexpr double kGravity = 9.80665;  // m/s^2
constexpr double kStateBound = 1e9;   // divergence threshold on |x|, |v| (SI)

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }
}  // namespace

void CableStage::validate() const {
  if (!finite_pos(moving_mass_kg)) throw std::invalid_argument("cable moving mass must be > 0");
  if (!finite_nonneg(viscosity)) throw std::invalid_argument("cable viscosity must be >= 0");
  if (!finite_pos(stiffness)) throw std::invalid_argument("cable stiffness must be > 0");
  if (!finite_nonneg(pretension_n)) throw std::invalid_argument("pretension must be >= 0");
}

void DummyLeg::validate() const {
  if (!finite_pos(inertia)) throw std::invalid_argument("leg inertia must be > 0");
  if (!finite_pos(length_m)) throw std::invalid_argument("leg length must be > 0");
  if (!finite_nonneg(viscosity) || !finite_nonneg(stiffness)) {
    throw std::invalid_argument("leg viscosity/stiffness must be >= 0");
  }
  if (!finite_nonneg(mass_kg) || !finite_nonneg(com_distance_m)) {
    throw std::invalid_argument("leg mass and com distance must be >= 0");
  }
  if (!(base_angle_deg >= 0.0 && base_angle_deg <= 90.0)) {
    throw std::invalid_argument("base angle must lie in [0, 90] deg");
  }
}

void SpringPair::validate() const {
  if (!finite_pos(stiffness)) throw std::invalid_argument("spring stiffness must be > 0");
  if (!std::isfinite(rest_position_mm)) throw std::invalid_argument("rest position must be finite");
}

void SensorModel::validate() const {
  if (!finite_nonneg(force_noise_sd)) throw std::invalid_argument("noise sd must be >= 0");
  if (!(std::isfinite(force_noise_clip) && force_noise_clip >= force_noise_sd)) {
    throw std::invalid_argument("noise clip must be >= the noise sd");
  }
  if (!finite_pos(quantum_cable_mm)) throw std::invalid_argument("encoder quantum must be > 0");
  if (!finite_nonneg(drift_rate)) throw std::invalid_argument("drift rate must be >= 0");
  if (!finite_nonneg(sag_mass_kg)) throw std::invalid_argument("sag mass must be >= 0");
}

SensorModel SensorModel::noiseless() const {
  SensorModel s = *this;
  s.force_noise_sd = 0.0;
  s.force_noise_clip = 0.0;
  s.drift_rate = 0.0;
  s.sag_mass_kg = 0.0;
  return s;
}

void PlantModel::validate() const {
  cable.validate();
  sensors.validate();
  if (!finite_pos(lever_m)) throw std::invalid_argument("lever must be > 0");
  std::visit(
      [](const auto& l) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(l)>, std::monostate>) l.validate();
      },
      load);
}

double sag_tension_error(double pretension_n, double sag_mass_kg, double span_front_m,
                         double span_rear_m) {
  if (!(std::isfinite(pretension_n) && pretension_n > 0.0)) {
    throw std::invalid_argument("pretension must be > 0");
  }
  if (sag_mass_kg < 0.0) throw std::invalid_argument("sag mass must be >= 0");
  if (!finite_pos(span_front_m) || !finite_pos(span_rear_m))
    throw std::invalid_argument("spans must be > 0");
  if (sag_mass_kg == 0.0) return 0.0;

  // Lumped mass at the cell joint: both spans carry the pretension, the sag
  // depth makes them meet at a kink. The cell axis follows the shorter span,
  // so the worst misalignment angle is against it.
  const double w = sag_mass_kg * kGravity;
  const double depth = w / (pretension_n * (1.0 / span_front_m + 1.0 / span_rear_m));
  const double theta = std::atan(depth / std::min(span_front_m, span_rear_m));
  return (1.0 - std::cos(theta)) + std::sin(theta);
}

namespace {

// Linear interpolation of the commanded motion between samples, in SI units.
struct CommandInterp {
  const traj::TrajectoryProfile& p;
  void operator()(double t, double& x_m, double& v_m) const {
    const double s = t / p.dt;
    const auto n = p.size();
    if (s <= 0.0) {
      x_m = p.positions.front() * 1e-3;
      v_m = 0.0;
      return;
    }
    if (s >= static_cast<double>(n - 1)) {
      x_m = p.positions.back() * 1e-3;
      v_m = 0.0;
      return;
    }
    const auto i = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(i);
    x_m = (p.positions[i] * (1.0 - f) + p.positions[i + 1] * f) * 1e-3;
    v_m = (p.velocities[i] * (1.0 - f) + p.velocities[i + 1] * f) * 1e-3;
  }
};

struct LoadParams {
  // Full transmitted load force:
  //   k_lin * (x - x_eq) + b_lin * x' + f_offset + gravity(theta(x))
  double m_eff;
  double k_lin;
  double b_lin;
  double f_offset = 0.0;  // static spring preload when x_eq != rest position
  // Leg gravity: tau(theta)/L with theta = theta0 + (x - x_eq)/L.
  bool has_gravity = false;
  double grav_scale = 0.0;  // m*g*c / L
  double theta0 = 0.0;
  double inv_lever = 0.0;
  double x_eq = 0.0;  // static equilibrium of the assembly coordinate
};

double load_force(const LoadParams& lp, double x, double v) {
  double f = lp.k_lin * (x - lp.x_eq) + lp.b_lin * v + lp.f_offset;
  if (lp.has_gravity) {
    f += lp.grav_scale * std::sin(lp.theta0 + (x - lp.x_eq) * lp.inv_lever);
  }
  return f;
}

struct DriveState {
  double force;  // net elastic drive on the assembly
  bool slack;
};

DriveState drive_force(const CableStage& c, double common_tension, double x, double v, double x_m,
                       double v_m) {
  const double raw = c.stiffness * (x_m - x) + c.viscosity * (v_m - v);
  const double t_front = common_tension + 0.5 * raw;
  const double t_rear = common_tension - 0.5 * raw;
  if (t_front >= 0.0 && t_rear >= 0.0) return {raw, false};
  return {std::max(t_front, 0.0) - std::max(t_rear, 0.0), true};
}

}  // namespace

SensorLog simulate(const PlantModel& model, const traj::TrajectoryProfile& profile,
                   std::uint64_t seed, SimTrace* trace) {
  model.validate();
  const std::size_t n = profile.size();
  if (n == 0) throw std::invalid_argument("profile is empty");
  if (profile.velocities.size() != n || profile.accelerations.size() != n) {
    throw std::invalid_argument("profile channels have different lengths");
  }
  if (std::abs(profile.dt - traj::kSamplePeriod) > 1e-12) {
    throw std::invalid_argument("plant integration expects the 1 kHz sample period");
  }

  const CableStage& c = model.cable;
  const double x0_cmd = profile.positions.front() * 1e-3;

  LoadParams lp{};
  lp.m_eff = c.moving_mass_kg;
  lp.k_lin = 0.0;
  lp.b_lin = 0.0;
  double static_load = 0.0;  // transmitted force at rest
  if (const auto* leg = std::get_if<DummyLeg>(&model.load)) {
    const double L = leg->length_m;
    lp.m_eff += leg->inertia / (L * L);
    lp.k_lin = leg->stiffness / (L * L);
    lp.b_lin = leg->viscosity / (L * L);
    lp.has_gravity = leg->gravity_on;
    lp.grav_scale = leg->mass_kg * kGravity * leg->com_distance_m / L;
    lp.theta0 = leg->base_angle_deg * std::numbers::pi / 180.0;
    lp.inv_lever = 1.0 / L;
    static_load = lp.has_gravity ? lp.grav_scale * std::sin(lp.theta0) : 0.0;
    lp.x_eq = x0_cmd - static_load / c.stiffness;
  } else if (const auto* spring = std::get_if<SpringPair>(&model.load)) {
    lp.k_lin = spring->stiffness;
    const double x_rest = spring->rest_position_mm * 1e-3;
    // Static balance: K_x (x0 - x) = K_s (x - x_rest).
    const double x_static =
        (c.stiffness * x0_cmd + spring->stiffness * x_rest) / (c.stiffness + spring->stiffness);
    static_load = spring->stiffness * (x_static - x_rest);
    lp.x_eq = x_static;
    lp.f_offset = static_load;
  } else {
    lp.x_eq = x0_cmd;
  }
  const bool bare_loop = std::holds_alternative<std::monostate>(model.load);

  const auto total_load = [&](double x, double v) {
    return bare_loop ? 0.0 : load_force(lp, x, v);
  };

  const SensorModel& sm = model.sensors;
  const double sag_err =
      sm.sag_mass_kg > 0.0 ? sag_tension_error(std::max(c.pretension_n, 1e-9), sm.sag_mass_kg) : 0.0;
  const double sag_gain = 1.0 - sag_err;

  CommandInterp cmd{profile};
  rng::NoiseStream noise(seed);

  SensorLog log;
  log.dt = profile.dt;
  log.ground_truth = model;
  log.x_cmd_mm.resize(n);
  log.x_meas_mm.resize(n);
  log.f1_n.resize(n);
  log.f2_n.resize(n);
  if (trace) {
    trace->load_pos_mm.resize(n);
    trace->load_vel_mm_s.resize(n);
    trace->drive_force_n.resize(n);
    trace->transmitted_force_n.resize(n);
  }

  double x = lp.x_eq;
  double v = 0.0;
  double moving_time = 0.0;
  const double dt = profile.dt;
  const double q = sm.quantum_cable_mm;

  auto accel = [&](double t, double xs, double vs, double tension) {
    double x_m, v_m;
    cmd(t, x_m, v_m);
    const DriveState d = drive_force(c, tension, xs, vs, x_m, v_m);
    return (d.force - total_load(xs, vs)) / lp.m_eff;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (!(std::abs(x) < kStateBound && std::abs(v) < kStateBound)) throw NumericInstability(i);

    const double tension = std::max(c.pretension_n - sm.drift_rate * moving_time, 0.0);

    double x_m, v_m;
    cmd(t, x_m, v_m);
    const DriveState d = drive_force(c, tension, x, v, x_m, v_m);
    if (d.slack) log.slack_samples.push_back(i);
    const double xacc = (d.force - total_load(x, v)) / lp.m_eff;
    const double transmitted = bare_loop ? d.force : d.force - c.moving_mass_kg * xacc;

    log.x_cmd_mm[i] = profile.positions[i];
    log.x_meas_mm[i] = q * std::round(profile.positions[i] / q);
    const double f1_ideal = (tension + 0.5 * transmitted) * sag_gain;
    const double f2_ideal = (tension - 0.5 * transmitted) * sag_gain;
    const double n1 = sm.force_noise_sd > 0.0 ? noise.clipped_normal(sm.force_noise_sd, sm.force_noise_clip) : 0.0;
    const double n2 = sm.force_noise_sd > 0.0 ? noise.clipped_normal(sm.force_noise_sd, sm.force_noise_clip) : 0.0;
    log.f1_n[i] = std::max(f1_ideal + n1, 0.0);
    log.f2_n[i] = std::max(f2_ideal + n2, 0.0);

    if (trace) {
      trace->load_pos_mm[i] = x * 1e3;
      trace->load_vel_mm_s[i] = v * 1e3;
      trace->drive_force_n[i] = d.force;
      trace->transmitted_force_n[i] = transmitted;
    }

    if (i + 1 == n) break;

    // Classical RK4 step at the sample rate.
    const double k1x = v, k1v = accel(t, x, v, tension);
    const double k2x = v + 0.5 * dt * k1v, k2v = accel(t + 0.5 * dt, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, tension);
    const double k3x = v + 0.5 * dt * k2v, k3v = accel(t + 0.5 * dt, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, tension);
    const double k4x = v + dt * k3v, k4v = accel(t + dt, x + dt * k3x, v + dt * k3v, tension);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    if (std::abs(v_m) > 1e-9) moving_time += dt;
  }

  return log;
}

SensorLog apply_drift(SensorLog log, double drift_rate) {
  if (!std::isfinite(drift_rate) || drift_rate < 0.0) {
    throw std::invalid_argument("drift rate must be >= 0");
  }
  for (std::size_t i = 0; i < log.size(); ++i) {
    const double drop = drift_rate * static_cast<double>(i) * log.dt;
    log.f1_n[i] = std::max(log.f1_n[i] - drop, 0.0);
    log.f2_n[i] = std::max(log.f2_n[i] - drop, 0.0);
  }
  return log;
}

}  // namespace ned::plant
