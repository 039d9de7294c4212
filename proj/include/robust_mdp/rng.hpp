#pragma once

#include <cstdint>
#include <initializer_list>

namespace robust_mdp {

// Counter-based randomness: every draw is a pure function of a key tuple,
// so streams are reproducible regardless of thread scheduling.

constexpr std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of the key hash.
constexpr double uniform01(std::initializer_list<std::uint64_t> words) {
  return static_cast<double>(hash_key(words) >> 11) * 0x1.0p-53;
}

}  // namespace robust_mdp
