#pragma once

#include <cstdint>
#include <random>

namespace sympref {

// Draws uniformly from [0, n) via rejection sampling. std::uniform_int_distribution
// is implementation-defined, which would break byte-identical reruns across
// standard libraries; this keeps draws a pure function of the mt19937_64 stream.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1) with 53 random mantissa bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sympref
