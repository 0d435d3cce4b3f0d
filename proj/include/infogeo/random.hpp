#pragma once

#include <cmath>
#include <cstdint>

namespace infogeo {

/// splitmix64 step. Batch runs derive per-trial seeds as the successive
/// outputs of this generator started at the master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed of trial i under master seed s.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial) {
  std::uint64_t state = master + trial * 0x9E3779B97F4A7C15ull;
  return splitmix64(state);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <class Engine>
double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal by Box-Muller on uniform01, so draws are identical
/// across standard libraries.
template <class Engine>
double standard_normal(Engine& eng) {
  const double u1 = 1.0 - uniform01(eng);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Standard exponential draw, -log(1 - U).
template <class Engine>
double standard_exponential(Engine& eng) {
  return -std::log1p(-uniform01(eng));
}

}  // namespace infogeo
