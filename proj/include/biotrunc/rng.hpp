// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Portable deterministic randomness.
//
// Every random stream is a std::mt19937_64 (fully specified by the C++
// standard) seeded with a 64-bit key derived from the run seed and a path of
// integer tags:
//
//   key = splitmix64(seed); for each tag t: key = splitmix64(key ^ t)
//
// Uniform variates use the top 53 bits, shifted by half an ulp so that 0 and 1
// are never produced. Normal variates use the AS241 inverse CDF, so each
// normal consumes exactly one engine output.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace biotrunc::rng {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = splitmix64(seed);
  for (std::uint64_t tag : path) key = splitmix64(key ^ tag);
  return key;
}

inline Engine stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Engine(derive_key(seed, path));
}

/// Uniform in the open interval (0, 1).
inline double uniform_open(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal quantile function, |relative error| ~ 1e-16.
double normal_quantile(double p);

inline double standard_normal(Engine& engine) { return normal_quantile(uniform_open(engine)); }

}  // namespace biotrunc::rng
