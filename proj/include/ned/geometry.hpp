#pragma once

#include <array>
#include <utility>

namespace ned::geom {

struct Vec2 {
  double x = 0.0;  // forward, m (hip joint at the origin)
  double y = 0.0;  // up, m
};

/// One measurement setup: straight leg of given length hanging at `hip_angle`
/// from vertical, pulleys placed on the perpendicular cable line through the
/// foot. Rail envelope is 3 m horizontal by 1.5 m vertical around the hip.
struct RigConfig {
  double leg_length_m = 0.9;
  double hip_angle_deg = 30.0;
  Vec2 front_pulley{1.40, -0.23};
  Vec2 rear_pulley{-1.20, -0.87};
  double motor_pulley_radius_m = 0.05;

  void validate() const;
  Vec2 foot() const;
  double front_run() const;  // cable span foot -> front pulley
  double rear_run() const;
};

struct SensitivityResult {
  double max_displacement_cm = 0.0;
  double worst_error = 0.0;
  RigConfig worst_case_config;
};

/// Eq-of-motion kinematic map: hip angle increment for a motor shaft
/// increment, (rho_m / L) * dtheta_m.
double motor_to_joint(double dtheta_motor_rad, const RigConfig& rig);

/// Force measurement error fraction caused by an off-plane displacement x_u
/// of the attachment point; the worst of the two cells governs.
double off_plane_error(double x_u_m, double span_front_m, double span_rear_m);

/// Force measurement error after the leg rotates away from the perpendicular
/// placement: misalignment angles from the law of cosines against the ideal
/// (co-rotated) pulley locations, error = 1 - mean cell projection.
double rotation_error(double displacement_m, const RigConfig& rig);

/// Largest side-way displacement whose worst-case off-plane error stays
/// within the budget, over gridded leg lengths, hip angles and cable runs.
/// pulley_ranges are the admissible free-run windows {front, rear} in m.
SensitivityResult max_sideway_displacement(double error_budget,
                                           std::array<double, 2> leg_range_m,
                                           std::array<double, 2> hip_range_deg,
                                           std::array<std::array<double, 2>, 2> pulley_ranges_m);

/// Same sweep for in-plane rotations, using rotation_error.
SensitivityResult max_rotation_displacement(double error_budget,
                                            std::array<double, 2> leg_range_m,
                                            std::array<double, 2> hip_range_deg,
                                            std::array<std::array<double, 2>, 2> pulley_ranges_m);

struct CapstanResult {
  double min_contact_angle_rad = 0.0;
  double turns = 0.0;
  int wraps = 0;  // ceil(turns)
};

/// Minimum capstan wrap to hold T_load against T_hold with friction mu.
CapstanResult capstan_min_turns(double t_load_n, double t_hold_n, double mu);

/// Transverse force needed to hold the attachment point x_u off plane:
/// both cable segments stretch and pull back with their deflection angles.
double sideway_restoring_force(double x_u_m, double pretension_n, double cable_stiffness_n_m,
                               const RigConfig& rig);

/// Free cable run measured from the load-cell joint rather than the
/// attachment point; the cell sits slightly inboard.
inline constexpr double kCellOffsetM = 0.015;

}  // namespace ned::geom
