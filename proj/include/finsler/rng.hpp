#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "finsler/types.hpp"

namespace finsler {

/// Seeded generator for reproducible sampling. Doubles are built from the raw
/// mt19937_64 stream rather than std::uniform_real_distribution, whose output
/// is implementation-defined; the draw sequence is therefore identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  /// Uniform direction on the unit sphere.
  Vec sphere_dir(int n) {
    for (;;) {
      Vec v = gaussian_vec(n);
      const double r = v.norm();
      if (r > 1e-12) return v / r;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace finsler
