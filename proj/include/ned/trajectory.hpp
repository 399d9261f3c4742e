#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ned::plant {
struct PlantModel;
}

namespace ned::traj {

inline constexpr double kSamplePeriod = 1e-3;  // 1 kHz command rate

/// Speed / acceleration / jerk bounds for the point-to-point planner.
/// Units are mm/s, mm/s^2, mm/s^3; all must be strictly positive and finite.
struct DynamicLimits {
  double v_max = 750.0;
  double a_max = 1.0e4;
  double j_max = 1.0e6;

  void validate() const;
};

/// Uniformly sampled commanded motion. Velocities and accelerations are the
/// centered differences of the sampled positions (end samples are at rest),
/// so the three sequences are self-consistent under finite differencing and
/// every sample respects the limits the profile was planned with.
struct TrajectoryProfile {
  double dt = kSamplePeriod;
  std::vector<double> positions;      // mm
  std::vector<double> velocities;     // mm/s
  std::vector<double> accelerations;  // mm/s^2

  std::size_t size() const { return positions.size(); }
  double duration() const { return positions.empty() ? 0.0 : dt * static_cast<double>(positions.size() - 1); }
};

enum class Direction { flexion, extension };

/// Ramp-and-hold perturbation request: rapid move of `amplitude_mm`, constant
/// plateau, rapid return. Sign of the excursion follows `direction`
/// (flexion = +, extension = -).
struct PerturbationSpec {
  double amplitude_mm = 8.0;
  double plateau_ms = 150.0;
  Direction direction = Direction::flexion;
  DynamicLimits limits;

  void validate() const;
};

/// Piecewise constant-jerk path starting and ending at rest. A hold is a
/// zero-jerk segment entered at rest. Positions are relative displacements;
/// the sampler adds the absolute origin.
struct SegmentPath {
  struct Segment {
    double duration;
    double jerk;  // signed, mm/s^3
  };
  struct Node {
    double t, x, v, a;
  };

  std::vector<Segment> segments;
  std::vector<Node> nodes;  // prefix states, segments.size()+1 entries

  double total_time() const { return nodes.empty() ? 0.0 : nodes.back().t; }
  double end_position() const { return nodes.empty() ? 0.0 : nodes.back().x; }

  /// Position/velocity/acceleration at time t (clamped to [0, total_time]).
  void eval(double t, double& x, double& v, double& a) const;

  void append_segment(double duration, double jerk);
  void append_hold(double duration);
  /// Appends a time-optimal rest-to-rest move of signed displacement `dist`.
  void append_move(double dist, const DynamicLimits& limits);

 private:
  void push_node(double duration, double jerk);
};

SegmentPath fastest_move_path(double distance, const DynamicLimits& limits);

/// Appends move + plateau + return. The hold is aligned to the sample grid so
/// that a plateau of D ms occupies exactly round(D) samples (at least one).
void append_ramp_hold(SegmentPath& path, double signed_amplitude_mm, double plateau_s,
                      const DynamicLimits& limits);

/// Samples a path at 1 kHz with one rest sample padded at each end;
/// derivative channels are centered differences of the positions.
TrajectoryProfile sample_path(const SegmentPath& path, double x0);

TrajectoryProfile plan_fastest_move(double x0, double x1, const DynamicLimits& limits);
TrajectoryProfile plan_ramp_hold(const PerturbationSpec& spec, double x0);
TrajectoryProfile plan_saw(double amplitude, double speed, int cycles, const DynamicLimits& limits);

/// Longest run of samples at the profile's extreme value, as [begin, end).
/// Returns {0, 0} when the profile never leaves its start position.
std::pair<std::size_t, std::size_t> plateau_range(const TrajectoryProfile& profile);

/// Checks every TrajectoryProfile invariant against the given limits.
/// Returns an empty string when valid, else a description of the violation.
std::string validate_profile(const TrajectoryProfile& profile, const DynamicLimits& limits);

struct PerturbationChoice {
  DynamicLimits limits;
  double ripple_n = 0.0;   // peak-to-peak force differential on the plateau
  std::size_t index = 0;   // position in the candidate list
};

/// Simulates a ramp-and-hold on `plant` for every candidate limit set and
/// returns the one with the smallest plateau force ripple (peak-to-peak of
/// F1-F2 after a 20 ms settling exclusion). Ties break on shorter motion,
/// then on candidate order. The same seed is used for every candidate.
PerturbationChoice optimize_perturbation(const plant::PlantModel& plant_model,
                                         double amplitude_mm, double plateau_ms,
                                         const std::vector<DynamicLimits>& candidates,
                                         std::uint64_t seed = 0);

}  // namespace ned::traj
