#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ned/errors.hpp"
#include "ned/trajectory.hpp"
#include "oracles.hpp"

using namespace ned;
using traj::DynamicLimits;
using traj::TrajectoryProfile;

namespace {

std::size_t longest_run_at(const TrajectoryProfile& p, double value) {
  std::size_t best = 0, run = 0;
  for (double x : p.positions) {
    if (std::abs(x - value) <= 1e-9) {
      ++run;
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("zero-distance move is a single at-rest sample") {
  const auto p = traj::plan_fastest_move(0.0, 0.0, {});
  CHECK(p.size() == 1);
  CHECK(p.positions[0] == 0.0);
  CHECK(p.velocities[0] == 0.0);
  CHECK(p.accelerations[0] == 0.0);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(traj::plan_fastest_move(0.0, std::nan(""), {}), std::invalid_argument);
  CHECK_THROWS_AS(traj::plan_fastest_move(0.0, 10.0, {-1.0, 1e4, 1e6}), std::invalid_argument);
  CHECK_THROWS_AS(traj::plan_saw(60.0, 800.0, 1, {750.0, 1e4, 1e6}), std::invalid_argument);
}

TEST_CASE("60 mm reference move: limits, endpoints, oracle duration") {
  const DynamicLimits lim{750.0, 1e4, 1e6};
  const auto p = traj::plan_fastest_move(0.0, 60.0, lim);

  CHECK(traj::validate_profile(p, lim).empty());
  CHECK(p.positions.front() == 0.0);
  CHECK(p.positions.back() == doctest::Approx(60.0).epsilon(1e-12));
  const double peak_v = *std::max_element(p.velocities.begin(), p.velocities.end());
  CHECK(peak_v <= 750.0);
  CHECK(peak_v > 600.0);  // the move is fast enough to approach the cap

  const double t_oracle = oracle::scurve_min_duration(60.0, lim);
  // Sampled profile carries one pad sample at each end on top of the
  // ceil-to-grid duration.
  const double overhead = 3.0 * p.dt;
  CHECK(p.duration() <= t_oracle + overhead + 1e-12);
  CHECK(p.duration() >= t_oracle - 1e-9);
}

TEST_CASE("planner matches the brute-force oracle over random cases") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> d_dist(0.5, 200.0);
  std::uniform_real_distribution<double> v_dist(50.0, 1000.0);
  std::uniform_real_distribution<double> a_dist(2e3, 5e4);
  std::uniform_real_distribution<double> j_dist(5e4, 5e6);

  for (int k = 0; k < 150; ++k) {
    const double d = d_dist(gen);
    const DynamicLimits lim{v_dist(gen), a_dist(gen), j_dist(gen)};
    const auto p = traj::plan_fastest_move(0.0, d, lim);
    INFO("case " << k << ": d=" << d << " v=" << lim.v_max << " a=" << lim.a_max
                 << " j=" << lim.j_max);
    CHECK(traj::validate_profile(p, lim).empty());
    CHECK(p.positions.back() == doctest::Approx(d).epsilon(1e-9));

    const double t_oracle = oracle::scurve_min_duration(d, lim);
    CHECK(p.duration() <= t_oracle + 3.0 * p.dt + 1e-12);  // never slower than the oracle + pads
    CHECK(p.duration() >= t_oracle - 1e-6);                // never beats the optimum
  }
}

TEST_CASE("symmetry: negated move is the samplewise negation") {
  const DynamicLimits lim{400.0, 2e4, 8e5};
  const auto fwd = traj::plan_fastest_move(0.0, 37.5, lim);
  const auto rev = traj::plan_fastest_move(0.0, -37.5, lim);
  REQUIRE(fwd.size() == rev.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    CHECK(fwd.positions[i] == -rev.positions[i]);
    CHECK(fwd.velocities[i] == -rev.velocities[i]);
    CHECK(fwd.accelerations[i] == -rev.accelerations[i]);
  }
}

TEST_CASE("determinism: identical inputs give bit-identical profiles") {
  const DynamicLimits lim{321.0, 1.7e4, 2.3e6};
  const auto a = traj::plan_fastest_move(1.25, 44.0, lim);
  const auto b = traj::plan_fastest_move(1.25, 44.0, lim);
  CHECK(a.positions == b.positions);
  CHECK(a.velocities == b.velocities);
  CHECK(a.accelerations == b.accelerations);
}

TEST_CASE("ramp-and-hold plateau") {
  traj::PerturbationSpec spec;
  spec.limits = {750.0, 1e4, 1e6};

  SUBCASE("150 ms plateau holds exactly 150 samples at +8 mm") {
    spec.amplitude_mm = 8.0;
    spec.plateau_ms = 150.0;
    const auto p = traj::plan_ramp_hold(spec, 0.0);
    CHECK(traj::validate_profile(p, spec.limits).empty());
    CHECK(longest_run_at(p, 8.0) == 150);
    CHECK(p.positions.back() == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("20 mm amplitude plateaus at 20 mm") {
    spec.amplitude_mm = 20.0;
    spec.plateau_ms = 150.0;
    const auto p = traj::plan_ramp_hold(spec, 0.0);
    const double peak = *std::max_element(p.positions.begin(), p.positions.end());
    CHECK(peak == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(longest_run_at(p, 20.0) == 150);
  }

  SUBCASE("zero plateau leaves no constant segment at the peak") {
    spec.amplitude_mm = 8.0;
    spec.plateau_ms = 0.0;
    const auto p = traj::plan_ramp_hold(spec, 0.0);
    const double peak = *std::max_element(p.positions.begin(), p.positions.end());
    CHECK(longest_run_at(p, peak) <= 1);
  }

  SUBCASE("extension flips the excursion sign") {
    spec.amplitude_mm = 8.0;
    spec.plateau_ms = 50.0;
    spec.direction = traj::Direction::extension;
    const auto p = traj::plan_ramp_hold(spec, 2.0);
    const double low = *std::min_element(p.positions.begin(), p.positions.end());
    CHECK(low == doctest::Approx(-6.0).epsilon(1e-12));
  }
}

TEST_CASE("saw patterns") {
  const DynamicLimits lim{750.0, 2e5, 2e7};

  SUBCASE("10 cycles reach both peaks") {
    const auto p = traj::plan_saw(60.0, 750.0, 10, lim);
    CHECK(traj::validate_profile(p, lim).empty());
    const double hi = *std::max_element(p.positions.begin(), p.positions.end());
    const double lo = *std::min_element(p.positions.begin(), p.positions.end());
    CHECK(hi == doctest::Approx(60.0).epsilon(1e-6));
    CHECK(lo == doctest::Approx(-60.0).epsilon(1e-6));
  }

  SUBCASE("slow cycle duration matches the closed-form triangle timing") {
    const auto p = traj::plan_saw(60.0, 20.0, 1, lim);
    // 4*60/20 = 12 s plus the jerk-limited corner blends.
    const double blend = 4.0 * 2.0 * (20.0 / lim.a_max + lim.a_max / lim.j_max);
    CHECK(p.duration() >= 12.0);
    CHECK(p.duration() <= 12.0 + blend + 0.01);
  }

  SUBCASE("commanded speed dominates the stroke") {
    const auto p = traj::plan_saw(60.0, 750.0, 1, lim);
    std::size_t at_speed = 0, moving = 0;
    for (double v : p.velocities) {
      if (std::abs(v) > 1e-6) ++moving;
      if (std::abs(std::abs(v) - 750.0) < 1e-6) ++at_speed;
    }
    CHECK(at_speed >= static_cast<std::size_t>(0.9 * static_cast<double>(moving)));
  }

  SUBCASE("zero cycles is an empty motion") {
    const auto p = traj::plan_saw(60.0, 100.0, 0, lim);
    CHECK(p.size() == 1);
  }
}

TEST_CASE("limit-respect across a parameter sweep") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> amp(0.5, 90.0);
  std::uniform_real_distribution<double> plateau(0.0, 300.0);
  for (int k = 0; k < 50; ++k) {
    traj::PerturbationSpec spec;
    spec.amplitude_mm = amp(gen);
    spec.plateau_ms = plateau(gen);
    spec.limits = {100.0 + amp(gen) * 10.0, 5e3 + plateau(gen) * 100.0, 1e5 + amp(gen) * 1e4};
    const auto p = traj::plan_ramp_hold(spec, 0.0);
    INFO("case " << k);
    CHECK(traj::validate_profile(p, spec.limits).empty());
  }
}
