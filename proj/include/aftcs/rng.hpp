#pragma once

#include <cmath>
#include <cstdint>

namespace aftcs {

// Counter-based deterministic randomness. Every draw is a pure function of
// (root seed, stream tag, sensor id, k1, k2), so adding a sensor or reordering
// unrelated events never perturbs another stream's values, and paired runs
// (same seed, different scheme) see identical draws for identical events.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  shadowing = 1,
  data_attempt = 2,
  poll = 3,
  reading = 4,
  best_effort = 5,
};

inline std::uint64_t draw_u64(std::uint64_t seed, Stream stream, std::uint64_t sensor,
                              std::uint64_t k1, std::uint64_t k2 = 0) {
  std::uint64_t h = splitmix64(seed ^ 0xa02b2c5e8f1d3b47ull);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ sensor);
  h = splitmix64(h ^ k1);
  h = splitmix64(h ^ k2);
  return h;
}

// Uniform in [0, 1).
inline double draw_uniform(std::uint64_t seed, Stream stream, std::uint64_t sensor,
                           std::uint64_t k1, std::uint64_t k2 = 0) {
  return static_cast<double>(draw_u64(seed, stream, sensor, k1, k2) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two decorrelated sub-draws.
inline double draw_normal(std::uint64_t seed, Stream stream, std::uint64_t sensor,
                          std::uint64_t k1, std::uint64_t k2 = 0) {
  const std::uint64_t h = draw_u64(seed, stream, sensor, k1, k2);
  double u1 = static_cast<double>((h >> 11) | 1ull) * 0x1.0p-53;
  double u2 = static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace rng
}  // namespace aftcs
