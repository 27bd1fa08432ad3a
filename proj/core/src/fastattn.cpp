//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/fastattn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <new>

namespace lgdiff {

namespace {

// Modified Gram-Schmidt on the rows of a; rows must be linearly independent,
// which holds almost surely for Gaussian draws.
void orthonormalize_rows(Tensor& a) {
  const int r = a.rows(), d = a.cols();
  for (int i = 0; i < r; ++i) {
    double* row_i = a.data() + static_cast<std::size_t>(i) * d;
    for (int k = 0; k < i; ++k) {
      const double* row_k = a.data() + static_cast<std::size_t>(k) * d;
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += row_i[j] * row_k[j];
      for (int j = 0; j < d; ++j) row_i[j] -= dot * row_k[j];
    }
    double norm = 0.0;
    for (int j = 0; j < d; ++j) norm += row_i[j] * row_i[j];
    norm = std::sqrt(norm);
    for (int j = 0; j < d; ++j) row_i[j] /= norm;
  }
}

}  // namespace

RandomFeatureMap make_random_features(int n_features, int d_head, std::uint64_t seed) {
  if (n_features < 1 || d_head < 1)
    throw InvalidInputError("random features: R and d_head must be positive");
  RandomFeatureMap rf;
  rf.n_features = n_features;
  rf.d_head = d_head;
  rf.seed = seed;
  rf.features = Tensor({n_features, d_head});
  Rng rng(seed);

  int written = 0;
  while (written < n_features) {
    const int block = std::min(d_head, n_features - written);
    Tensor square({d_head, d_head});
    for (std::int64_t i = 0; i < square.numel(); ++i) square[i] = rng.normal();
    orthonormalize_rows(square);
    for (int r = 0; r < block; ++r) {
      // Chi-distributed row norm restores the marginal Gaussian length.
      double norm_sq = 0.0;
      for (int j = 0; j < d_head; ++j) {
        const double gauss = rng.normal();
        norm_sq += gauss * gauss;
      }
      const double scale = std::sqrt(norm_sq);
      for (int j = 0; j < d_head; ++j)
        rf.features(written + r, j) = square(r, j) * scale;
    }
    written += block;
  }
  return rf;
}

Tensor favor_feature_map(const Tensor& x, const RandomFeatureMap& rf) {
  if (x.ndim() != 2 || x.cols() != rf.d_head)
    throw ShapeError("feature_map: input must be tokens x d_head with d_head = " +
                     std::to_string(rf.d_head));
  const int tokens = x.rows(), r = rf.n_features, d = rf.d_head;
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));
  Tensor out({tokens, r});
  for (int i = 0; i < tokens; ++i) {
    const double* xi = x.data() + static_cast<std::size_t>(i) * d;
    double sq = 0.0;
    for (int j = 0; j < d; ++j) sq += xi[j] * xi[j];
    const double half_sq = 0.5 * sq;
    double* oi = out.data() + static_cast<std::size_t>(i) * r;
    for (int f = 0; f < r; ++f) {
      const double* w = rf.features.data() + static_cast<std::size_t>(f) * d;
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += w[j] * xi[j];
      oi[f] = std::exp(dot - half_sq) * inv_sqrt_r;
    }
  }
  return out;
}

Tensor linear_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                        const RandomFeatureMap& rf) {
  if (q.ndim() != 2 || k.ndim() != 2 || v.ndim() != 2)
    throw ShapeError("linear_attention: rank-2 inputs required");
  if (q.cols() != k.cols() || k.rows() != v.rows())
    throw ShapeError("linear_attention: Q/K/V shapes inconsistent");
  const int d = q.cols();
  const double pre = std::pow(static_cast<double>(d), -0.25);
  Tensor qs = q, ks = k;
  scale_inplace(qs, pre);
  scale_inplace(ks, pre);

  const Tensor phi_q = favor_feature_map(qs, rf);  // Mq x R
  const Tensor phi_k = favor_feature_map(ks, rf);  // Mk x R

  const Tensor kv = matmul_tn(phi_k, v);           // R x d
  Tensor out = matmul(phi_q, kv);                  // Mq x d

  // Denominator phi(Q) (phi(K)^T 1): R-vector of key-feature sums.
  std::vector<double> ksum(static_cast<std::size_t>(rf.n_features), 0.0);
  for (int i = 0; i < phi_k.rows(); ++i) {
    const double* row = phi_k.data() + static_cast<std::size_t>(i) * rf.n_features;
    for (int f = 0; f < rf.n_features; ++f) ksum[static_cast<std::size_t>(f)] += row[f];
  }
  for (int i = 0; i < out.rows(); ++i) {
    const double* qrow = phi_q.data() + static_cast<std::size_t>(i) * rf.n_features;
    double denom = 0.0;
    for (int f = 0; f < rf.n_features; ++f) denom += qrow[f] * ksum[static_cast<std::size_t>(f)];
    if (denom < 1e-30)
      throw NumericalError("linear_attention: normalizer underflow at token " + std::to_string(i));
    double* orow = out.data() + static_cast<std::size_t>(i) * out.cols();
    for (int j = 0; j < out.cols(); ++j) orow[j] /= denom;
  }
  return out;
}

Tensor exact_softmax_attention(const Tensor& q, const Tensor& k, const Tensor& v) {
  if (q.ndim() != 2 || k.ndim() != 2 || v.ndim() != 2)
    throw ShapeError("exact_softmax_attention: rank-2 inputs required");
  if (q.cols() != k.cols() || k.rows() != v.rows())
    throw ShapeError("exact_softmax_attention: Q/K/V shapes inconsistent");
  Tensor scores = matmul_nt(q, k);
  scale_inplace(scores, 1.0 / std::sqrt(static_cast<double>(q.cols())));
  for (int i = 0; i < scores.rows(); ++i)
    softmax_inplace(scores.data() + static_cast<std::size_t>(i) * scores.cols(), scores.cols());
  return matmul(scores, v);
}

std::vector<AttentionBenchRow> bench_attention(std::span<const int> atom_counts,
                                               std::span<const std::string> kernels,
                                               const AttentionBenchOptions& opts) {
  std::vector<AttentionBenchRow> rows;
  for (const std::string& kernel : kernels) {
    if (kernel != "softmax" && kernel != "linear")
      throw InvalidInputError("bench_attention: unknown kernel '" + kernel + "'");
    for (int n : atom_counts) {
      if (n < 2) throw InvalidInputError("bench_attention: atom counts must be >= 2");
      const int m = n * (n - 1) / 2;
      AttentionBenchRow row;
      row.kernel = kernel;
      row.n_atoms = n;
      row.m_nodes = m;

      Rng rng(opts.seed ^ static_cast<std::uint64_t>(n));
      Tensor q({m, opts.d_head}), k({m, opts.d_head}), v({m, opts.d_head});
      for (std::int64_t i = 0; i < q.numel(); ++i) q[i] = rng.normal() * 0.5;
      for (std::int64_t i = 0; i < k.numel(); ++i) k[i] = rng.normal() * 0.5;
      for (std::int64_t i = 0; i < v.numel(); ++i) v[i] = rng.normal();
      const RandomFeatureMap rf = make_random_features(opts.n_features, opts.d_head, opts.seed);

      try {
        std::vector<double> times;
        std::int64_t peak = 0;
        for (int rep = 0; rep <= opts.repeats; ++rep) {
          memstat::reset_peak();
          const std::int64_t before = memstat::peak_bytes();
          const auto start = std::chrono::steady_clock::now();
          Tensor out = kernel == "softmax" ? exact_softmax_attention(q, k, v)
                                           : linear_attention(q, k, v, rf);
          const auto stop = std::chrono::steady_clock::now();
          if (out.numel() == 0) throw NumericalError("bench_attention: empty output");
          if (rep == 0) continue;  // warmup
          times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
          peak = std::max(peak, memstat::peak_bytes() - before);
        }
        std::sort(times.begin(), times.end());
        row.median_ms = times[times.size() / 2];
        row.peak_bytes = peak;
      } catch (const std::bad_alloc&) {
        row.failed = true;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_bench_csv(const std::string& path, std::span<const AttentionBenchRow> rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InvalidInputError("cannot open '" + path + "' for writing");
  os << "kernel,n_atoms,m_nodes,median_ms,peak_bytes\n";
  for (const auto& r : rows)
    os << r.kernel << ',' << r.n_atoms << ',' << r.m_nodes << ',' << r.median_ms << ','
       << r.peak_bytes << '\n';
}

}  // namespace lgdiff
