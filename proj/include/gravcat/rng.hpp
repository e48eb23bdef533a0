#pragma once

#include <cstdint>

namespace gravcat {

/// Small deterministic generator (splitmix64). Used instead of the standard
/// distributions so that identical seeds give identical streams on every
/// platform and standard library.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1): never 0, never 1. Handy for inverse-CDF
  /// sampling where log(0) must not happen.
  double uniform_open01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }
};

}  // namespace gravcat
