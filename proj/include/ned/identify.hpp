#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ned/plant.hpp"

namespace ned::ident {

enum class Domain { joint, cable };

/// Fitted second-order parameters. Joint domain: kg*m^2, N*m*s/rad, N*m/rad.
/// Cable domain: kg, N*s/m, N/m.
struct ImpedanceEstimate {
  double inertia_or_mass = 0.0;
  double viscosity = 0.0;
  double stiffness = 0.0;
  double nrmse_percent = 0.0;
  Domain domain = Domain::joint;
  bool converged = false;
  int iterations = 0;
};

struct PoleSet {
  enum class Damping { overdamped, underdamped, critical };
  std::array<double, 2> pole_frequencies_hz{};  // sorted ascending
  Damping classification = Damping::overdamped;
};

/// 100 * (1 - ||measured-modeled|| / ||measured-mean(measured)||).
double nrmse(std::span<const double> measured, std::span<const double> modeled);

/// Output-error fit of a linear second-order model over one or more logs.
/// Joint domain regresses hip angle against torque (F1-F2)*lever; cable
/// domain regresses the force differential against the commanded
/// displacement. `initial_mass` seeds the optimizer's mass iterate.
ImpedanceEstimate fit_second_order(const std::vector<plant::SensorLog>& logs, double initial_mass,
                                   Domain domain, double lever_m);

/// Convenience: one estimate per log.
std::vector<ImpedanceEstimate> fit_per_trial(const std::vector<plant::SensorLog>& logs,
                                             double initial_mass, Domain domain, double lever_m);

/// Plateau stiffness per the ramp-and-hold method: mean force change over
/// mean displacement inside [t_start, t_end] ms, both relative to the 100 ms
/// pre-motion baseline. Joint domain returns N*m/rad, cable domain N/m.
double plateau_stiffness(const plant::SensorLog& log, double t_start_ms, double t_end_ms,
                         double lever_m, Domain domain = Domain::cable);

PoleSet poles(const ImpedanceEstimate& est);

/// First sample where the commanded position leaves its initial value;
/// log.size() when the command never moves.
std::size_t motion_onset(const plant::SensorLog& log);

}  // namespace ned::ident
