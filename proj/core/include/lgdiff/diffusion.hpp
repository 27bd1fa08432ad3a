//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <span>
#include <vector>

#include "lgdiff/autodiff.hpp"
#include "lgdiff/molgraph.hpp"
#include "lgdiff/rng.hpp"
#include "lgdiff/tensor.hpp"

namespace lgdiff {

// Cosine signal schedule. alpha_bar[0] = 1 and alpha_bar is strictly
// decreasing; per-step ratios are clamped into [1e-6, 1 - 1e-6] and
// alpha_bar is rebuilt as their running product, so multi-step ratios
// compose bit-exactly out of the stored per-step values.
struct NoiseSchedule {
  int t_steps = 0;                 // T
  std::vector<double> alpha;       // size T+1; alpha[0] unused
  std::vector<double> alpha_bar;   // size T+1; alpha_bar[0] = 1
};

NoiseSchedule build_cosine_schedule(int t_steps, double s_offset = 0.008);

// Marginal categorical noising kernel Q(t) = alpha_t * Id + (1-alpha_t) 1 m^T
// over the b+1 bond classes, plus its closed-form multi-step products.
class TransitionModel {
 public:
  TransitionModel() = default;
  TransitionModel(NoiseSchedule schedule, std::vector<double> marginals);

  int n_classes() const { return static_cast<int>(marginals_.size()); }
  int t_steps() const { return schedule_.t_steps; }
  const NoiseSchedule& schedule() const { return schedule_; }
  const std::vector<double>& marginals() const { return marginals_; }

  // Product of per-step alphas over (s, t]; equals alpha_bar(t)/alpha_bar(s).
  double step_ratio(int s, int t) const;

  Tensor transition(int t) const;            // Q(t)
  Tensor multi_step(int s, int t) const;     // Q_{s->t}, 0 <= s < t <= T
  Tensor cumulative(int t) const;            // Qbar(t) = Q_{0->t}

 private:
  NoiseSchedule schedule_;
  std::vector<double> marginals_;
};

// Bond-class frequencies over all unordered atom pairs of a corpus,
// including the no-bond class.
std::vector<double> estimate_bond_marginals(std::span<const MolecularGraph> corpus, int n_classes);

// Independently corrupts every unordered pair by Qbar(t); symmetric output.
MolecularGraph forward_corrupt(const MolecularGraph& clean, int t, const TransitionModel& model,
                               Rng& rng);

// q(E_s | E_t, E_0) for arbitrary 0 <= s < t, exact under the forward
// process: proportional to q(E_t|E_s) q(E_s|E_0).
std::vector<double> skipped_posterior(int e_t, int e0, int s, int t, const TransitionModel& model);

// The standard one-step posterior q(E_{t-1} | E_t, E_0), written against
// Q(t) and Qbar(t-1) directly; reference route for the skipped posterior.
std::vector<double> unit_step_posterior(int e_t, int e0, int t, const TransitionModel& model);

// p(E_s | E_t) = sum over clean classes of q(E_s|E_t,e0) * clean_probs[e0].
std::vector<double> model_posterior(std::span<const double> clean_probs, int e_t, int s, int t,
                                    const TransitionModel& model);

// Mean cross-entropy of per-pair clean-bond logits against the clean classes
// over unordered pairs (the i<j line-graph order).
Value training_loss(Value pair_logits, const std::vector<int>& clean_pair_classes);

// Clean bond classes in line-graph pair order.
std::vector<int> pair_classes(const MolecularGraph& g, const LineGraphIndex& lg);

}  // namespace lgdiff
