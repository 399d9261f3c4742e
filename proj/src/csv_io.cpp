#include "ned/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ned::io {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_profile_csv(std::ostream& os, const traj::TrajectoryProfile& p) {
  os << "t_s,pos_mm,vel_mm_s,acc_mm_s2\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << format_g9(static_cast<double>(i) * p.dt) << ',' << format_g9(p.positions[i]) << ','
       << format_g9(p.velocities[i]) << ',' << format_g9(p.accelerations[i]) << '\n';
  }
}

void write_profile_csv(const std::string& path, const traj::TrajectoryProfile& p) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_profile_csv(f, p);
}

namespace {

std::vector<std::vector<double>> read_table(const std::string& path, const std::string& header,
                                            std::size_t cols) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || line != header) {
    throw std::runtime_error(path + ": unexpected header");
  }
  std::vector<std::vector<double>> out(cols);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short row");
      out[c].push_back(std::stod(cell));
    }
  }
  return out;
}

}  // namespace

traj::TrajectoryProfile read_profile_csv(const std::string& path) {
  auto t = read_table(path, "t_s,pos_mm,vel_mm_s,acc_mm_s2", 4);
  traj::TrajectoryProfile p;
  p.positions = std::move(t[1]);
  p.velocities = std::move(t[2]);
  p.accelerations = std::move(t[3]);
  return p;
}

void write_log_csv(std::ostream& os, const plant::SensorLog& log) {
  os << "t_s,x_cmd_mm,x_meas_mm,f1_n,f2_n\n";
  for (std::size_t i = 0; i < log.size(); ++i) {
    os << format_g9(static_cast<double>(i) * log.dt) << ',' << format_g9(log.x_cmd_mm[i]) << ','
       << format_g9(log.x_meas_mm[i]) << ',' << format_g9(log.f1_n[i]) << ','
       << format_g9(log.f2_n[i]) << '\n';
  }
}

void write_log_csv(const std::string& path, const plant::SensorLog& log) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_log_csv(f, log);
}

plant::SensorLog read_log_csv(const std::string& path) {
  auto t = read_table(path, "t_s,x_cmd_mm,x_meas_mm,f1_n,f2_n", 5);
  plant::SensorLog log;
  log.x_cmd_mm = std::move(t[1]);
  log.x_meas_mm = std::move(t[2]);
  log.f1_n = std::move(t[3]);
  log.f2_n = std::move(t[4]);
  return log;
}

std::string estimate_record(const ident::ImpedanceEstimate& est) {
  const ident::PoleSet ps = ident::poles(est);
  std::ostringstream os;
  os << "inertia=" << format_g9(est.inertia_or_mass) << '\n'
     << "viscosity=" << format_g9(est.viscosity) << '\n'
     << "stiffness=" << format_g9(est.stiffness) << '\n'
     << "nrmse=" << format_g9(est.nrmse_percent) << '\n'
     << "pole1_hz=" << format_g9(ps.pole_frequencies_hz[0]) << '\n'
     << "pole2_hz=" << format_g9(ps.pole_frequencies_hz[1]) << '\n';
  return os.str();
}

}  // namespace ned::io
