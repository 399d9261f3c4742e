#pragma once

#include <map>
#include <string>

#include "ned/plant.hpp"
#include "ned/trajectory.hpp"

namespace ned::config {

/// Flat `key = value` file with `[section]` headers and `#` comments.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string text(const std::string& section, const std::string& key) const;
  std::string text_or(const std::string& section, const std::string& key,
                      const std::string& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Builds a plant from [cable], [sensors], [plant] and one of [leg]/[spring];
/// a missing load section (or `load = none`) gives the bare cable loop.
plant::PlantModel load_plant(const Config& cfg);
plant::PlantModel load_plant_file(const std::string& path);

/// Reads [limits] into planner limits; missing keys keep the defaults.
traj::DynamicLimits load_limits(const Config& cfg, const traj::DynamicLimits& defaults = {});

}  // namespace ned::config
