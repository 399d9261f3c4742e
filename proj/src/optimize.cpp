#include <cmath>
#include <limits>

#include "ned/errors.hpp"
#include "ned/plant.hpp"
#include "ned/trajectory.hpp"

namespace ned::traj {

PerturbationChoice optimize_perturbation(const plant::PlantModel& plant_model, double amplitude_mm,
                                         double plateau_ms, const std::vector<DynamicLimits>& candidates,
                                         std::uint64_t seed) {
  if (candidates.empty()) throw std::invalid_argument("candidate list is empty");

  PerturbationChoice best;
  double best_ripple = std::numeric_limits<double>::infinity();
  std::size_t best_samples = 0;
  bool found = false;

  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    try {
      PerturbationSpec spec{amplitude_mm, plateau_ms, Direction::flexion, candidates[idx]};
      const TrajectoryProfile profile = plan_ramp_hold(spec, 0.0);
      const plant::SensorLog log = plant::simulate(plant_model, profile, seed);

      auto [pb, pe] = plateau_range(profile);
      if (pe <= pb) continue;
      const auto settle = static_cast<std::size_t>(std::lround(0.020 / profile.dt));
      std::size_t wb = pb + settle;
      if (wb >= pe) wb = pe - 1;  // very short plateaus: take what is left

      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = wb; i < pe; ++i) {
        const double d = log.f1_n[i] - log.f2_n[i];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      const double ripple = hi - lo;
      const std::size_t samples = profile.size();
      if (ripple < best_ripple || (ripple == best_ripple && samples < best_samples)) {
        best_ripple = ripple;
        best_samples = samples;
        best = {candidates[idx], ripple, idx};
        found = true;
      }
    } catch (const std::exception&) {
      continue;  // infeasible candidate; keep searching
    }
  }
  if (!found) throw NoFeasibleCandidate();
  return best;
}

}  // namespace ned::traj
