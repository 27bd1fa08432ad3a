//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "lgdiff/errors.hpp"

namespace lgdiff {

// 64-bit mixing step (splitmix64). Used for seed derivation and as the
// seedless hash behind circular fingerprints and canonical keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic PRNG. std::mt19937_64 has a standard-specified sequence;
// the sampling transforms are hand-rolled so streams are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, caching the spare draw.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in {0, ..., n-1}.
  int uniform_int(int n) {
    if (n <= 0) throw InvalidInputError("uniform_int: n must be positive");
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  // Sample an index from an (approximately normalized) distribution.
  int categorical(const double* p, int n) {
    const double u = uniform();
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += p[i];
      if (u < cum) return i;
    }
    return n - 1;
  }

  // Derived independent stream; deterministic in (seed, stream).
  Rng fork(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x51ed2701)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lgdiff
