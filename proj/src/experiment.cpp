#include "ned/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ned/csv_io.hpp"
#include "ned/identify.hpp"

namespace ned::exp {

namespace fs = std::filesystem;
using nlohmann::json;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double iqr(std::vector<double> v) {
  if (v.size() < 2) return 0.0;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1.0 - f) + v[i + 1] * f : v[i];
  };
  return quantile(0.75) - quantile(0.25);
}

namespace {

struct Condition {
  double speed, angle, amplitude, duration;
};

std::vector<Condition> build_grid(const ExperimentSpec& s) {
  std::vector<Condition> out;
  const std::vector<double> speeds = s.speeds_mm_s.empty() ? std::vector<double>{s.limits.v_max}
                                                           : s.speeds_mm_s;
  const std::vector<double> angles = s.angles_deg.empty() ? std::vector<double>{-1.0} : s.angles_deg;
  const std::vector<double> amps =
      s.amplitudes_mm.empty() ? std::vector<double>{s.amplitude_mm} : s.amplitudes_mm;
  const std::vector<double> durs =
      s.durations_ms.empty() ? std::vector<double>{s.plateau_ms} : s.durations_ms;
  for (double sp : speeds)
    for (double an : angles)
      for (double am : amps)
        for (double du : durs) out.push_back({sp, an, am, du});
  return out;
}

traj::TrajectoryProfile condition_profile(const ExperimentSpec& s, const Condition& c) {
  traj::DynamicLimits lim = s.limits;
  lim.v_max = c.speed;
  traj::SegmentPath path;
  path.append_hold(s.lead_ms * 1e-3);
  if (s.kind == Kind::saw) {
    traj::DynamicLimits stroke = lim;
    stroke.v_max = c.speed;
    for (int k = 0; k < s.saw_cycles; ++k) {
      path.append_move(s.saw_amplitude_mm, stroke);
      path.append_move(-2.0 * s.saw_amplitude_mm, stroke);
      path.append_move(s.saw_amplitude_mm, stroke);
    }
  } else {
    traj::append_ramp_hold(path, c.amplitude, c.duration * 1e-3, lim);
  }
  path.append_hold(s.tail_ms * 1e-3);
  return traj::sample_path(path, 0.0);
}

plant::PlantModel condition_plant(const ExperimentSpec& s, const Condition& c) {
  plant::PlantModel m = s.plant;
  if (c.angle >= 0.0) {
    if (auto* leg = std::get_if<plant::DummyLeg>(&m.load)) leg->base_angle_deg = c.angle;
  }
  return m;
}

double initial_mass_guess(const ExperimentSpec& s) {
  if (s.fit_domain == ident::Domain::cable) return s.plant.cable.moving_mass_kg;
  if (const auto* leg = std::get_if<plant::DummyLeg>(&s.plant.load)) return leg->inertia;
  return 1.0;
}

}  // namespace

RunManifest run_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  spec.plant.validate();
  spec.limits.validate();

  const std::vector<Condition> grid = build_grid(spec);
  const bool to_disk = spec.write_logs && !spec.out_dir.empty();
  if (to_disk) fs::create_directories(spec.out_dir);

  RunManifest manifest;
  manifest.spec = spec;
  manifest.tool_version = kToolVersion;

  const double mass0 = initial_mass_guess(spec);

  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    const Condition& c = grid[ci];
    const plant::PlantModel pm = condition_plant(spec, c);
    const traj::TrajectoryProfile profile = condition_profile(spec, c);

    std::vector<std::future<plant::SensorLog>> futures;
    futures.reserve(static_cast<std::size_t>(spec.trials));
    std::vector<std::uint64_t> seeds;
    for (int t = 0; t < spec.trials; ++t) {
      const std::uint64_t seed =
          spec.base_seed + ci * static_cast<std::uint64_t>(spec.trials) + static_cast<std::uint64_t>(t);
      seeds.push_back(seed);
      futures.push_back(std::async(std::launch::async,
                                   [&pm, &profile, seed] { return plant::simulate(pm, profile, seed); }));
    }

    std::vector<plant::SensorLog> logs;
    logs.reserve(futures.size());
    for (std::size_t t = 0; t < futures.size(); ++t) {
      try {
        logs.push_back(futures[t].get());
      } catch (const std::exception& e) {
        throw std::runtime_error("condition " + std::to_string(ci) + " trial " + std::to_string(t) +
                                 ": " + e.what());
      }
    }

    ConditionResult res;
    res.speed_mm_s = c.speed;
    res.angle_deg = c.angle;
    res.amplitude_mm = c.amplitude;
    res.duration_ms = c.duration;
    res.seeds = std::move(seeds);

    if (to_disk) {
      for (std::size_t t = 0; t < logs.size(); ++t) {
        std::ostringstream name;
        name << "trial_c" << ci << "_t" << t << ".csv";
        const std::string path = (fs::path(spec.out_dir) / name.str()).string();
        io::write_log_csv(path, logs[t]);
        res.log_paths.push_back(path);
      }
    }

    res.estimate = ident::fit_second_order(logs, mass0, spec.fit_domain, pm.lever_m);
    if (spec.per_trial_fits) {
      res.per_trial = ident::fit_per_trial(logs, mass0, spec.fit_domain, pm.lever_m);
    }
    manifest.conditions.push_back(std::move(res));
  }

  std::vector<double> is, bs, ks, ns;
  for (const auto& c : manifest.conditions) {
    is.push_back(c.estimate.inertia_or_mass);
    bs.push_back(c.estimate.viscosity);
    ks.push_back(c.estimate.stiffness);
    ns.push_back(c.estimate.nrmse_percent);
  }
  manifest.aggregate = {median(is), iqr(is), median(bs), iqr(bs), median(ks), iqr(ks), median(ns)};

  if (to_disk) {
    std::ofstream agg(fs::path(spec.out_dir) / "aggregate.csv");
    agg << aggregate_csv(manifest);
    std::ofstream mf(fs::path(spec.out_dir) / "manifest.json");
    mf << manifest_json(manifest) << '\n';
  }
  return manifest;
}

std::string aggregate_csv(const RunManifest& m) {
  std::ostringstream os;
  const bool spring_grid = m.spec.kind == Kind::ramp_hold && !m.spec.amplitudes_mm.empty();
  if (spring_grid) {
    os << "amplitude_mm,duration_ms,K,nrmse\n";
    for (const auto& c : m.conditions) {
      os << io::format_g9(c.amplitude_mm) << ',' << io::format_g9(c.duration_ms) << ','
         << io::format_g9(c.estimate.stiffness) << ',' << io::format_g9(c.estimate.nrmse_percent)
         << '\n';
    }
  } else {
    os << "speed,angle,I,B,K,nrmse\n";
    for (const auto& c : m.conditions) {
      os << io::format_g9(c.speed_mm_s) << ',' << io::format_g9(c.angle_deg) << ','
         << io::format_g9(c.estimate.inertia_or_mass) << ',' << io::format_g9(c.estimate.viscosity)
         << ',' << io::format_g9(c.estimate.stiffness) << ','
         << io::format_g9(c.estimate.nrmse_percent) << '\n';
    }
  }
  return os.str();
}

namespace {

json estimate_json(const ident::ImpedanceEstimate& e) {
  return json{{"inertia_or_mass", e.inertia_or_mass},
              {"viscosity", e.viscosity},
              {"stiffness", e.stiffness},
              {"nrmse_percent", e.nrmse_percent},
              {"domain", e.domain == ident::Domain::joint ? "joint" : "cable"},
              {"converged", e.converged},
              {"iterations", e.iterations}};
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["spec"] = {{"kind", m.spec.kind == Kind::saw ? "saw" : "ramp_hold"},
               {"fit_domain", m.spec.fit_domain == ident::Domain::joint ? "joint" : "cable"},
               {"trials", m.spec.trials},
               {"base_seed", m.spec.base_seed},
               {"amplitude_mm", m.spec.amplitude_mm},
               {"plateau_ms", m.spec.plateau_ms},
               {"lead_ms", m.spec.lead_ms},
               {"tail_ms", m.spec.tail_ms},
               {"speeds_mm_s", m.spec.speeds_mm_s},
               {"angles_deg", m.spec.angles_deg},
               {"amplitudes_mm", m.spec.amplitudes_mm},
               {"durations_ms", m.spec.durations_ms},
               {"out_dir", m.spec.out_dir}};
  j["conditions"] = json::array();
  for (const auto& c : m.conditions) {
    json jc{{"speed_mm_s", c.speed_mm_s},
            {"angle_deg", c.angle_deg},
            {"amplitude_mm", c.amplitude_mm},
            {"duration_ms", c.duration_ms},
            {"seeds", c.seeds},
            {"logs", c.log_paths},
            {"estimate", estimate_json(c.estimate)}};
    if (!c.per_trial.empty()) {
      jc["per_trial"] = json::array();
      for (const auto& e : c.per_trial) jc["per_trial"].push_back(estimate_json(e));
    }
    j["conditions"].push_back(std::move(jc));
  }
  j["aggregate"] = {{"median_inertia", m.aggregate.median_inertia},
                    {"iqr_inertia", m.aggregate.iqr_inertia},
                    {"median_viscosity", m.aggregate.median_viscosity},
                    {"iqr_viscosity", m.aggregate.iqr_viscosity},
                    {"median_stiffness", m.aggregate.median_stiffness},
                    {"iqr_stiffness", m.aggregate.iqr_stiffness},
                    {"median_nrmse", m.aggregate.median_nrmse}};
  return j.dump(2);
}

}  // namespace ned::exp
