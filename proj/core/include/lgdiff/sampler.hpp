//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>
#include <vector>

#include "lgdiff/denoiser.hpp"
#include "lgdiff/diffusion.hpp"
#include "lgdiff/molgraph.hpp"

namespace lgdiff {

// Strictly decreasing timesteps T = taus[0] > ... > taus[J] = 0; one network
// evaluation per step.
struct JumpSchedule {
  std::vector<int> taus;
  int evaluations() const { return static_cast<int>(taus.size()) - 1; }
};

enum class JumpSpacing { uniform, cosine };

JumpSchedule make_jump_schedule(int t_steps, int evaluations, JumpSpacing spacing = JumpSpacing::uniform);

// Clean-bond probabilities (M x C, softmaxed) for a noisy graph at step t.
using DenoiseFn = std::function<Tensor(const MolecularGraph& noisy, int t)>;

struct SampleTrace {
  int denoiser_calls = 0;
  double final_score = 0.0;  // mean per-pair log-probability of the emitted classes
};

// Reverse sampling along a jump schedule: initialize every pair from the
// marginals, step through model posteriors, and resolve the final step by
// per-pair argmax of the clean-bond prediction.
MolecularGraph reverse_sample(const std::vector<int>& atom_types, const DenoiseFn& denoise,
                              const TransitionModel& model, const JumpSchedule& schedule,
                              Rng& rng, SampleTrace* trace = nullptr);

struct Candidate {
  MolecularGraph graph;
  double score = 0.0;
  std::uint64_t seed = 0;
  int j_steps = 0;
  double gen_ms = 0.0;
};

struct CandidateOptions {
  int n_candidates = 100;
  std::uint64_t seed = 0;
  bool filter_valence = false;
  int n_threads = 1;
};

// Independent candidates with per-candidate derived seeds, ranked by score
// descending with canonical-key tie-breaks.
std::vector<Candidate> generate_candidates(const std::vector<int>& atom_types,
                                           const DenoiseFn& denoise, const TransitionModel& model,
                                           const JumpSchedule& schedule,
                                           const CandidateOptions& opts, const AtomVocab& vocab);

// Wraps a trained denoiser as a DenoiseFn. The conditioning projection is
// precomputed once; each call records a throwaway graph. Thread-safe for
// concurrent calls over shared read-only parameters.
DenoiseFn make_denoise_fn(const DenoiserParams& params, const LineGraphIndex& lg,
                          const Tensor& raw_cond, int t_steps, std::uint64_t rf_seed = 0);

}  // namespace lgdiff
