#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace noonring {

/// Seed for the consumer named `label`, derived from the run seed so that
/// independent consumers never share a stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view label) {
  return std::mt19937_64(derive_seed(seed, label));
}

/// Uniform double in [lo, hi) from the top 53 bits; unlike
/// std::uniform_real_distribution the sequence is fixed across standard
/// library implementations.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace noonring
