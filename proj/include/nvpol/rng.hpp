#pragma once

#include <cstdint>
#include <random>

namespace nvpol {

/// Seed for reproducible sampling: the same seed and inputs give the same
/// outputs, independent of evaluation order.
struct RandomSeed {
  std::uint64_t value = 0;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives an independent substream seed from a base seed and up to three
/// stream indices (e.g. angle, source, trial).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state = h ^ (a + 0x9E3779B97F4A7C15ull);
  h = splitmix64(state);
  state = h ^ (b + 0xD1B54A32D192ED03ull);
  h = splitmix64(state);
  state = h ^ (c + 0x8CB92BA72F3D8DD7ull);
  return splitmix64(state);
}

inline std::mt19937_64 make_engine(RandomSeed seed) {
  return std::mt19937_64(seed.value);
}

}  // namespace nvpol
