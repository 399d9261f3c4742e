#pragma once

#include <iosfwd>
#include <string>

#include "ned/identify.hpp"
#include "ned/plant.hpp"
#include "ned/trajectory.hpp"

namespace ned::io {

/// `t_s,pos_mm,vel_mm_s,acc_mm_s2`, one row per sample, 9 significant digits.
void write_profile_csv(std::ostream& os, const traj::TrajectoryProfile& profile);
void write_profile_csv(const std::string& path, const traj::TrajectoryProfile& profile);
traj::TrajectoryProfile read_profile_csv(const std::string& path);

/// `t_s,x_cmd_mm,x_meas_mm,f1_n,f2_n`.
void write_log_csv(std::ostream& os, const plant::SensorLog& log);
void write_log_csv(const std::string& path, const plant::SensorLog& log);
plant::SensorLog read_log_csv(const std::string& path);

/// Flat key=value record: inertia, viscosity, stiffness, nrmse, pole1_hz, pole2_hz.
std::string estimate_record(const ident::ImpedanceEstimate& est);

/// %.9g, shared by every CSV writer so outputs stay byte-reproducible.
std::string format_g9(double v);

}  // namespace ned::io
