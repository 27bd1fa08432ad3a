//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <vector>

#include "lgdiff/molgraph.hpp"

namespace lgdiff {

// Fixed-size circular-fingerprint bitset. Deterministic function of the
// graph up to isomorphism; bit positions come from a fixed seedless 64-bit
// mixer (splitmix64) so fingerprints are bit-exact across implementations.
class Fingerprint {
 public:
  Fingerprint(int n_bits, int radius)
      : n_bits_(n_bits), radius_(radius), words_(static_cast<std::size_t>((n_bits + 63) / 64), 0) {}

  int n_bits() const { return n_bits_; }
  int radius() const { return radius_; }

  void set(int bit) { words_[static_cast<std::size_t>(bit) / 64] |= 1ULL << (bit % 64); }
  bool test(int bit) const { return (words_[static_cast<std::size_t>(bit) / 64] >> (bit % 64)) & 1ULL; }

  int popcount() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const Fingerprint& o) const = default;

 private:
  int n_bits_;
  int radius_;
  std::vector<std::uint64_t> words_;
};

Fingerprint circular_fingerprint(const MolecularGraph& g, int radius = 2, int n_bits = 2048);

// |a AND b| / |a OR b|; 1 when both fingerprints are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

// 0/1 vector of length n_bits, used as the conditioning input.
std::vector<double> fingerprint_to_dense(const Fingerprint& fp);

}  // namespace lgdiff
