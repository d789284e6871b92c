#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace citemetrics {

/// splitmix64 step; the de-facto standard seed mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Named seed derivation: every stochastic component draws its seed as
/// derive_seed(base, component_name, index), so trials are independently
/// seeded and runs reproduce bit-for-bit.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(base ^ fnv1a64(label)) ^ index);
}

/// Unbiased draw from [0, n) via Lemire's multiply-shift rejection; avoids
/// std::uniform_int_distribution, whose output differs across standard
/// libraries.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace citemetrics
