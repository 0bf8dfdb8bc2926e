#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace proclivity::rng {

using Engine = std::mt19937_64;

// 53-bit uniform in [0, 1). Explicit construction instead of
// std::uniform_real_distribution so that streams are identical across
// standard library implementations.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n). n must be > 0.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

// Fisher-Yates with the engine above; std::shuffle is not portable
// across library implementations.
template <typename T>
void shuffle(std::vector<T>& items, Engine& eng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Number of misses before the next Bernoulli(p) hit. Used for sparse
// edge sampling; returns a huge value when p is (near) zero.
inline std::uint64_t geometric_skip(Engine& eng, double p) {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::uint64_t(-1);
  double u = uniform01(eng);
  double k = std::floor(std::log1p(-u) / std::log1p(-p));
  if (k >= 9.2e18) return std::uint64_t(-1);
  return static_cast<std::uint64_t>(k);
}

}  // namespace proclivity::rng
