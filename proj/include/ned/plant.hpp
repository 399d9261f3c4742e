#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "ned/trajectory.hpp"

namespace ned::plant {

/// Lumped model of the pretensioned cable loop: the moving assembly (cable,
/// turnbuckles, load-cells, fixture) of mass `moving_mass_kg` is driven by
/// the loop elasticity toward the motor-commanded coordinate.
struct CableStage {
  double moving_mass_kg = 0.5;   // M_x
  double viscosity = 59.04;      // B_x, N*s/m
  double stiffness = 543.1;      // K_x, N/m
  double pretension_n = 200.0;

  void validate() const;
};

/// Rigid surrogate leg pivoting about the hip. The cable attaches at the
/// endpoint, lever arm = length; small-angle map theta = x / length.
struct DummyLeg {
  double inertia = 1.84;        // kg*m^2 about the hip
  double viscosity = 1.5;       // N*m*s/rad
  double stiffness = 5.0;       // N*m/rad about the test posture
  double mass_kg = 18.0;
  double com_distance_m = 0.33;
  double length_m = 0.7;
  double base_angle_deg = 15.0;  // hip angle of the test posture, from vertical
  bool gravity_on = true;

  void validate() const;
};

/// Two parallel springs lumped into one linear stiffness anchored to the frame.
struct SpringPair {
  double stiffness = 1000.0;      // K_s, N/m (combined)
  double rest_position_mm = 0.0;

  void validate() const;
};

struct SensorModel {
  double force_noise_sd = 0.29;     // N
  double force_noise_clip = 1.0;    // N, hard bound on the noise term
  double encoder_quantum_deg = 0.019;  // motor-shaft resolution
  double quantum_cable_mm = 0.35;      // cable displacement per encoder count
  double drift_rate = 1.0 / 33.6;      // N/s of tension loss while the cable moves
  double sag_mass_kg = 0.5;            // lumped mass deflecting the cable

  void validate() const;
  /// Same geometry but with noise, drift and sag disabled.
  SensorModel noiseless() const;
};

using Load = std::variant<std::monostate, DummyLeg, SpringPair>;

struct PlantModel {
  CableStage cable;
  Load load;  // monostate = bare cable loop (interface characterisation runs)
  SensorModel sensors;
  double lever_m = 0.7;  // maps the force differential to hip torque

  void validate() const;
  bool has_leg() const { return std::holds_alternative<DummyLeg>(load); }
  bool has_spring() const { return std::holds_alternative<SpringPair>(load); }
};

/// Time series produced by one simulated run. x_meas comes from the motor
/// encoder (quantized command); F1/F2 are the two load-cell channels.
struct SensorLog {
  double dt = traj::kSamplePeriod;
  std::vector<double> x_cmd_mm;
  std::vector<double> x_meas_mm;
  std::vector<double> f1_n;
  std::vector<double> f2_n;
  PlantModel ground_truth;
  std::vector<std::size_t> slack_samples;  // samples where a cable side went slack

  std::size_t size() const { return x_cmd_mm.size(); }
};

/// Ground-truth internals, for diagnostics and energy bookkeeping.
struct SimTrace {
  std::vector<double> load_pos_mm;    // moving-assembly coordinate
  std::vector<double> load_vel_mm_s;
  std::vector<double> drive_force_n;        // net elastic drive on the assembly
  std::vector<double> transmitted_force_n;  // force differential seen by the cells
};

/// Integrates the cable stage and its load while the motor end follows the
/// profile exactly; applies sensor imperfections afterwards. Deterministic
/// for a fixed seed. The measured force differential is the load interaction
/// force for leg/spring plants and the elastic drive force for a bare loop.
SensorLog simulate(const PlantModel& model, const traj::TrajectoryProfile& profile,
                   std::uint64_t seed, SimTrace* trace = nullptr);

/// Relative discrepancy between the load-cell-axis tension and the true cable
/// tension when a lumped mass sags the cable between spans (a, b); strictly
/// decreasing in the pretension.
double sag_tension_error(double pretension_n, double sag_mass_kg,
                         double span_front_m = 1.25, double span_rear_m = 1.25);

/// Subtracts drift_rate * t from both force channels (clamped at zero).
SensorLog apply_drift(SensorLog log, double drift_rate);

}  // namespace ned::plant
