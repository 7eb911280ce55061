#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace sqfn {

/// Worker count: hardware concurrency, capped by SQFN_THREADS when set (>= 1).
[[nodiscard]] unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Indices are
/// handed out in contiguous chunks; callers write results by index, so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// 64-bit mixing step used to derive independent per-trial seeds.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Seed for trial i of a run seeded with `seed`.
[[nodiscard]] inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(seed ^ splitmix64(i + 0x9E3779B97F4A7C15ULL));
}

}  // namespace sqfn
