#pragma once

#include <cstdint>
#include <random>

namespace maght {

// splitmix64 step; used to derive decorrelated per-purpose seeds from one
// scenario seed so that changing one generation parameter (e.g. the drift
// level) leaves every other random stream untouched.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t stream = 0) {
  return std::mt19937_64(mix_seed(seed, stream));
}

}  // namespace maght
