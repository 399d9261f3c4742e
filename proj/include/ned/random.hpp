#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace ned::rng {

/// Seeded noise stream. mt19937_64 plus an explicit Box-Muller transform so
/// that identical seeds give bit-identical streams on every platform
/// (std::normal_distribution is implementation defined).
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in (0, 1].
  double uniform01() {
    return static_cast<double>((gen_() >> 11) + 1ull) * 0x1.0p-53;
  }

  double normal(double sd) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Gaussian sample hard-limited to [-clip, clip].
  double clipped_normal(double sd, double clip) {
    return std::clamp(normal(sd), -clip, clip);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ned::rng
