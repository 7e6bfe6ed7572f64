#pragma once

#include <cstdint>
#include <random>

namespace hsparse {

using Seed = std::uint64_t;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `stream` under master seed `master`. Distinct streams give
/// statistically independent generators, so trials and bench cells can run
/// in any order (or concurrently) and still reproduce.
constexpr Seed derive_seed(Seed master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(Seed seed, std::uint64_t stream = 0) { return Rng(derive_seed(seed, stream)); }

}  // namespace hsparse
