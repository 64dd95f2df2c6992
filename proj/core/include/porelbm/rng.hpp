#pragma once

#include <cstdint>
#include <random>

namespace porelbm {

// All randomness in the project comes from std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The standard distributions are not
// portable across library implementations, so the conversions below are
// done by hand.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % bound;
}

}  // namespace porelbm
