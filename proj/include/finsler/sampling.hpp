#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/rng.hpp"
#include "finsler/types.hpp"

namespace finsler {

/// Seeded sampling region for verification drivers: an annulus
/// r_min <= |x| <= r_max with an optional rejection predicate for
/// degenerate-gradient loci. Same seed, same points.
struct SampleSpec {
  std::uint64_t seed = 7;
  int count = 100;
  double r_min = 0.3;
  double r_max = 3.0;
  std::function<bool(const Vec&)> exclude;  // true -> reject the draw
};

inline std::vector<Vec> draw_samples(const SampleSpec& s, int n) {
  if (s.count < 1) throw Error("sample count must be >= 1");
  if (!(s.r_min >= 0.0) || !(s.r_min < s.r_max))
    throw Error("sample annulus needs 0 <= r_min < r_max");
  Rng rng(s.seed);
  std::vector<Vec> pts;
  pts.reserve(s.count);
  long attempts = 0;
  const long cap = 1000L * s.count + 1000;
  while (static_cast<int>(pts.size()) < s.count) {
    if (++attempts > cap)
      throw Error("sample rejection cap exceeded; exclusion predicate too strict");
    Vec x = rng.uniform(s.r_min, s.r_max) * rng.sphere_dir(n);
    if (s.exclude && s.exclude(x)) continue;
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace finsler
