//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lgdiff/denoiser.hpp"
#include "lgdiff/fingerprint.hpp"
#include "lgdiff/mces.hpp"
#include "lgdiff/molgraph.hpp"

namespace lgdiff {

struct EvalQuery {
  MolecularGraph truth;
  std::vector<MolecularGraph> candidates;  // ranked best-first
};

struct EvalOptions {
  std::vector<int> ks = {1, 10};
  int fp_radius = 2;
  int fp_bits = 2048;
  int mces_max_bonds = 12;
};

struct EvalReport {
  struct KMetrics {
    int k = 0;
    double accuracy = 0.0;
    double mces = 0.0;      // mean of per-query minima over top-k
    double tanimoto = 0.0;  // mean of per-query maxima over top-k
    int mces_scored = 0;    // queries contributing to the MCES mean
  };
  int n_queries = 0;
  int empty_candidate_queries = 0;
  int mces_skipped = 0;  // query/candidate pairs over the MCES size cap
  std::vector<KMetrics> per_k;

  const KMetrics& at_k(int k) const;
};

// Accuracy via canonical-key equality within the top-k; Tanimoto@k is the
// per-query maximum, MCES@k the per-query minimum; all averaged over queries.
// Queries with no candidates score as misses with worst-case metrics and are
// counted in empty_candidate_queries.
EvalReport evaluate(const std::vector<EvalQuery>& queries, const EvalOptions& opts = {});

std::string report_to_json(const EvalReport& report, std::uint64_t config_hash);
std::string report_to_table(const EvalReport& report);

// ---- cross-attention asymmetry (bond -> endpoint-atom weights) ----

struct AsymmetryRecord {
  int i = 0;  // pair endpoints, i < j
  int j = 0;
  int bond_type = 0;
  std::string bond_class;  // e.g. "C-O", low-electronegativity symbol first
  bool homonuclear = false;
  double alpha_low = 0.0;   // weight on the less electronegative endpoint
  double alpha_high = 0.0;  // weight on the more electronegative endpoint
  double log2_ratio = 0.0;  // log2(alpha_low / alpha_high)
};

struct AsymmetrySummary {
  std::string bond_class;
  int count = 0;
  double mean_log2 = 0.0;
  double stderr_log2 = 0.0;
};

struct AsymmetryResult {
  std::vector<AsymmetryRecord> records;
  std::vector<AsymmetrySummary> summary;
};

// Head-averaged final-layer bond->atom attention weights on the clean graph
// at t = 1. Homonuclear bonds get a seed-randomized orientation.
AsymmetryResult attention_asymmetry(const DenoiserParams& params, const MolecularGraph& graph,
                                    const AtomVocab& vocab, const Tensor& raw_cond, int t_steps,
                                    std::uint64_t orientation_seed);

std::vector<AsymmetrySummary> summarize_asymmetry(const std::vector<AsymmetryRecord>& records);

}  // namespace lgdiff
