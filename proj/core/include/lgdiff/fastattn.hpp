//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgdiff/rng.hpp"
#include "lgdiff/tensor.hpp"

namespace lgdiff {

// Positive orthogonal random features for the softmax kernel. Rows are
// orthogonalized within d_head-sized blocks and rescaled to chi-distributed
// norms; deterministic per seed.
struct RandomFeatureMap {
  int n_features = 0;  // R
  int d_head = 0;
  std::uint64_t seed = 0;
  Tensor features;     // R x d_head
};

RandomFeatureMap make_random_features(int n_features, int d_head, std::uint64_t seed);

// phi(x)_r = exp(w_r . x - |x|^2 / 2) / sqrt(R); strictly positive.
Tensor favor_feature_map(const Tensor& x, const RandomFeatureMap& rf);

// Softmax-kernel linear attention: out = phi(Q')[phi(K')^T V] / (phi(Q')[phi(K')^T 1])
// with Q' = Q d^{-1/4}, K' = K d^{-1/4}, so the implied kernel matches the
// exact scaled dot-product reference. Never materializes an MxM matrix.
Tensor linear_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                        const RandomFeatureMap& rf);

// Standard O(M^2) scaled dot-product attention; the reference oracle.
Tensor exact_softmax_attention(const Tensor& q, const Tensor& k, const Tensor& v);

struct AttentionBenchRow {
  std::string kernel;
  int n_atoms = 0;
  int m_nodes = 0;
  double median_ms = -1.0;  // -1 marks a failure row (e.g. out of memory)
  std::int64_t peak_bytes = 0;
  bool failed = false;
};

struct AttentionBenchOptions {
  int repeats = 5;
  int d_head = 32;
  int n_features = 128;
  std::uint64_t seed = 17;
};

// Times one attention call per repeat on M = n(n-1)/2 token inputs and
// records the median wall-clock and peak live tensor bytes.
std::vector<AttentionBenchRow> bench_attention(std::span<const int> atom_counts,
                                               std::span<const std::string> kernels,
                                               const AttentionBenchOptions& opts = {});

// CSV with header kernel,n_atoms,m_nodes,median_ms,peak_bytes.
void write_bench_csv(const std::string& path, std::span<const AttentionBenchRow> rows);

}  // namespace lgdiff
