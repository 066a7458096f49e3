#pragma once

#include <cstdint>
#include <random>

namespace lightlayers {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix_seed(mix_seed(base) ^ (index * 0xd1342543de82ef95ULL + 1));
}

// 53-bit uniform in [0,1); spelled out so the stream is identical across
// standard library implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }
inline int uniform_int(Rng& rng, int lo, int hiInclusive) {
  return lo + static_cast<int>(uniform01(rng) * (hiInclusive - lo + 1));
}

}  // namespace lightlayers
