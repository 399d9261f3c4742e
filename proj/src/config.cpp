#include "ned/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ned::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::runtime_error("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::text(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) throw std::runtime_error("missing config section [" + section + "]");
  const auto k = s->second.find(key);
  if (k == s->second.end()) {
    throw std::runtime_error("missing config key " + section + "." + key);
  }
  return k->second;
}

std::string Config::text_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? text(section, key) : fallback;
}

double Config::number(const std::string& section, const std::string& key) const {
  const std::string v = text(section, key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("config key " + section + "." + key + " is not a number: " + v);
}

double Config::number_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

plant::PlantModel load_plant(const Config& cfg) {
  plant::PlantModel m;
  m.cable.moving_mass_kg = cfg.number_or("cable", "moving_mass_kg", m.cable.moving_mass_kg);
  m.cable.viscosity = cfg.number_or("cable", "viscosity_n_s_m", m.cable.viscosity);
  m.cable.stiffness = cfg.number_or("cable", "stiffness_n_m", m.cable.stiffness);
  m.cable.pretension_n = cfg.number_or("cable", "pretension_n", m.cable.pretension_n);

  const bool has_leg = cfg.sections().count("leg") > 0;
  const bool has_spring = cfg.sections().count("spring") > 0;
  if (has_leg && has_spring) throw std::runtime_error("config declares both [leg] and [spring]");
  if (has_leg) {
    plant::DummyLeg leg;
    leg.inertia = cfg.number_or("leg", "inertia_kg_m2", leg.inertia);
    leg.viscosity = cfg.number_or("leg", "viscosity_nm_s_rad", leg.viscosity);
    leg.stiffness = cfg.number_or("leg", "stiffness_nm_rad", leg.stiffness);
    leg.mass_kg = cfg.number_or("leg", "mass_kg", leg.mass_kg);
    leg.com_distance_m = cfg.number_or("leg", "com_distance_m", leg.com_distance_m);
    leg.length_m = cfg.number_or("leg", "length_m", leg.length_m);
    leg.base_angle_deg = cfg.number_or("leg", "base_angle_deg", leg.base_angle_deg);
    leg.gravity_on = cfg.number_or("leg", "gravity_on", 1.0) != 0.0;
    m.load = leg;
    m.lever_m = leg.length_m;
  } else if (has_spring) {
    plant::SpringPair spring;
    spring.stiffness = cfg.number_or("spring", "stiffness_n_m", spring.stiffness);
    spring.rest_position_mm = cfg.number_or("spring", "rest_position_mm", spring.rest_position_mm);
    m.load = spring;
  }

  m.sensors.force_noise_sd = cfg.number_or("sensors", "force_noise_sd_n", m.sensors.force_noise_sd);
  m.sensors.force_noise_clip = cfg.number_or("sensors", "force_noise_clip_n", m.sensors.force_noise_clip);
  m.sensors.encoder_quantum_deg = cfg.number_or("sensors", "encoder_quantum_deg", m.sensors.encoder_quantum_deg);
  m.sensors.quantum_cable_mm = cfg.number_or("sensors", "quantum_cable_mm", m.sensors.quantum_cable_mm);
  m.sensors.drift_rate = cfg.number_or("sensors", "drift_rate_n_s", m.sensors.drift_rate);
  m.sensors.sag_mass_kg = cfg.number_or("sensors", "sag_mass_kg", m.sensors.sag_mass_kg);

  m.lever_m = cfg.number_or("plant", "lever_m", m.lever_m);
  m.validate();
  return m;
}

plant::PlantModel load_plant_file(const std::string& path) {
  return load_plant(Config::parse_file(path));
}

traj::DynamicLimits load_limits(const Config& cfg, const traj::DynamicLimits& defaults) {
  traj::DynamicLimits lim = defaults;
  lim.v_max = cfg.number_or("limits", "v_max_mm_s", lim.v_max);
  lim.a_max = cfg.number_or("limits", "a_max_mm_s2", lim.a_max);
  lim.j_max = cfg.number_or("limits", "j_max_mm_s3", lim.j_max);
  return lim;
}

}  // namespace ned::config
