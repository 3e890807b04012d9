#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mecsim {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a key path, so that
/// every stochastic draw is addressed by what it is for rather than by the
/// order in which it happens to be evaluated.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(base);
  for (auto k : keys) h = mix64(h ^ mix64(k));
  return h;
}

/// Uniform in [0, 1) from a derived seed, without constructing an engine.
constexpr double hash_uniform(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  return static_cast<double>(derive_seed(base, keys) >> 11) * 0x1.0p-53;
}

using Rng = std::mt19937_64;

}  // namespace mecsim
