#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace skillease::detail {

// Uniform double in [0,1) from the engine's top 53 bits. Pinned here so
// generated fixtures and splits do not depend on unspecified distribution
// internals of the standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n); n must be positive. The modulo bias is far below
// anything observable at the sizes this project draws.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Standard normal via Box-Muller.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0,1], keeps log finite
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// In-place Fisher-Yates shuffle driven by `bounded`.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace skillease::detail
