#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace finsler {

/// Runs fn(i) for i in [begin, end). When enabled, the range is split into
/// static contiguous chunks, one per worker; results must be written into
/// per-index slots so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(int begin, int end, bool enabled, Fn&& fn) {
  const int len = end - begin;
  if (len <= 0) return;
  const unsigned hw = std::thread::hardware_concurrency();
  if (!enabled || hw < 2 || len < 2) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(len)));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + static_cast<int>(static_cast<long long>(len) * w / workers);
    const int hi = begin + static_cast<int>(static_cast<long long>(len) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace finsler
