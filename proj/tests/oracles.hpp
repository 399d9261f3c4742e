#pragma once

// Test-only reference computations, kept independent of the library's
// planner/solver code paths.

#include <cmath>
#include <limits>
#include <vector>

#include "ned/trajectory.hpp"

namespace oracle {

// Brute-force minimum duration over rest-to-rest 7-segment profiles.
// For each jerk-ramp duration t_j on a fine grid the total duration
//   T(t_a) = 2 t_j + t_a + dist / v_pk(t_a)   (cruise >= 0)
// is convex in the constant-acceleration duration t_a, so a bisected
// feasibility bound plus ternary search finds the exact per-t_j optimum.
inline double scurve_min_duration(double dist, const ned::traj::DynamicLimits& lim) {
  dist = std::abs(dist);
  if (dist == 0.0) return 0.0;
  const double j = lim.j_max, a = lim.a_max, v = lim.v_max;

  auto duration_of = [&](double tj, double ta) {
    if (tj <= 0.0 || ta < 0.0) return std::numeric_limits<double>::infinity();
    const double a_pk = j * tj;
    const double v_pk = j * tj * (tj + ta);
    if (a_pk > a * (1.0 + 1e-12) || v_pk > v * (1.0 + 1e-12)) {
      return std::numeric_limits<double>::infinity();
    }
    const double d_ramp = v_pk * (2.0 * tj + ta);  // accel + decel distance
    if (d_ramp > dist * (1.0 + 1e-12)) return std::numeric_limits<double>::infinity();
    return 4.0 * tj + 2.0 * ta + (dist - d_ramp) / v_pk;
  };

  const double tj_hi = std::min(a / j, std::sqrt(v / j));
  double best = std::numeric_limits<double>::infinity();

  auto best_for_tj = [&](double tj) {
    if (tj <= 0.0) return std::numeric_limits<double>::infinity();
    // Upper bound on t_a from the speed cap, tightened by the distance cap.
    double ta_hi = std::max(v / (j * tj) - tj, 0.0);
    if (!std::isfinite(duration_of(tj, 0.0))) return std::numeric_limits<double>::infinity();
    if (!std::isfinite(duration_of(tj, ta_hi))) {
      double lo = 0.0, hi = ta_hi;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::isfinite(duration_of(tj, mid))) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      ta_hi = lo;
    }
    double lo = 0.0, hi = ta_hi;
    for (int it = 0; it < 120; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (duration_of(tj, m1) <= duration_of(tj, m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    return std::min(duration_of(tj, 0.5 * (lo + hi)),
                    std::min(duration_of(tj, 0.0), duration_of(tj, ta_hi)));
  };

  const int nj = 400;
  double best_tj = tj_hi;
  for (int i = 1; i <= nj; ++i) {
    const double tj = tj_hi * static_cast<double>(i) / nj;
    const double T = best_for_tj(tj);
    if (T < best) {
      best = T;
      best_tj = tj;
    }
  }
  // Local refinement of t_j around the grid winner.
  double lo = std::max(best_tj - tj_hi / nj, 1e-9), hi = std::min(best_tj + tj_hi / nj, tj_hi);
  for (int it = 0; it < 90; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (best_for_tj(m1) <= best_for_tj(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  best = std::min(best, best_for_tj(0.5 * (lo + hi)));
  return best;
}

// Trapezoid quadrature of f[i] sampled at dt.
inline double trapz(const std::vector<double>& f, double dt) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) s += 0.5 * (f[i] + f[i + 1]) * dt;
  return s;
}

}  // namespace oracle
