#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ned/identify.hpp"
#include "ned/plant.hpp"
#include "ned/trajectory.hpp"

namespace ned::exp {

enum class Kind { ramp_hold, saw };

/// One batch of simulated trials over a condition grid. For ramp-and-hold
/// runs the grid is speeds x angles (angles override the leg posture) or
/// amplitudes x durations for spring work; saw runs use speeds alone.
struct ExperimentSpec {
  plant::PlantModel plant;
  Kind kind = Kind::ramp_hold;
  ident::Domain fit_domain = ident::Domain::joint;

  std::vector<double> speeds_mm_s;      // per-condition velocity limit
  std::vector<double> angles_deg;       // leg base angles; empty = keep plant's
  std::vector<double> amplitudes_mm;    // ramp-hold amplitude grid
  std::vector<double> durations_ms;     // plateau duration grid
  double amplitude_mm = 61.1;           // used when amplitudes_mm is empty
  double plateau_ms = 200.0;
  double saw_amplitude_mm = 60.0;
  int saw_cycles = 2;
  traj::DynamicLimits limits;           // v_max replaced by the condition speed
  double lead_ms = 200.0;               // rest hold before/after the motion
  double tail_ms = 300.0;

  int trials = 20;
  std::uint64_t base_seed = 1;
  std::string out_dir;                  // empty = keep logs in memory only
  bool write_logs = true;
  bool per_trial_fits = false;
};

struct ConditionResult {
  double speed_mm_s = 0.0;
  double angle_deg = 0.0;
  double amplitude_mm = 0.0;
  double duration_ms = 0.0;
  ident::ImpedanceEstimate estimate;              // joint fit over all trials
  std::vector<ident::ImpedanceEstimate> per_trial;
  std::vector<std::string> log_paths;
  std::vector<std::uint64_t> seeds;
};

struct Aggregate {
  double median_inertia = 0.0, iqr_inertia = 0.0;
  double median_viscosity = 0.0, iqr_viscosity = 0.0;
  double median_stiffness = 0.0, iqr_stiffness = 0.0;
  double median_nrmse = 0.0;
};

struct RunManifest {
  ExperimentSpec spec;
  std::vector<ConditionResult> conditions;
  Aggregate aggregate;
  std::string tool_version;
};

/// Runs every condition x trial, fits, writes per-trial CSVs, manifest.json
/// and aggregate.csv under spec.out_dir (when set), and returns the manifest.
/// Trials execute concurrently; all outputs are ordered by index.
RunManifest run_experiment(const ExperimentSpec& spec);

/// Aggregate CSV payload (`speed,angle,I,B,K,nrmse` for impedance grids,
/// `amplitude_mm,duration_ms,K,nrmse` for spring plateau grids).
std::string aggregate_csv(const RunManifest& manifest);
std::string manifest_json(const RunManifest& manifest);

double median(std::vector<double> v);
double iqr(std::vector<double> v);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ned::exp
