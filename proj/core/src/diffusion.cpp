//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/diffusion.hpp"

#include <algorithm>
#include <cmath>

namespace lgdiff {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kAlphaClampLo = 1e-6;
constexpr double kAlphaClampHi = 1.0 - 1e-6;
}  // namespace

NoiseSchedule build_cosine_schedule(int t_steps, double s_offset) {
  if (t_steps < 1) throw InvalidInputError("schedule: T must be >= 1");
  auto f = [&](double t) {
    const double x = (t / t_steps + s_offset) / (1.0 + s_offset) * kPi / 2.0;
    const double c = std::cos(x);
    return c * c;
  };
  const double f0 = f(0.0);

  NoiseSchedule sched;
  sched.t_steps = t_steps;
  sched.alpha.assign(static_cast<std::size_t>(t_steps) + 1, 1.0);
  sched.alpha_bar.assign(static_cast<std::size_t>(t_steps) + 1, 1.0);
  double prev = 1.0;
  for (int t = 1; t <= t_steps; ++t) {
    const double target = f(static_cast<double>(t)) / f0;
    double a = target / prev;
    a = std::clamp(a, kAlphaClampLo, kAlphaClampHi);
    sched.alpha[static_cast<std::size_t>(t)] = a;
    sched.alpha_bar[static_cast<std::size_t>(t)] = sched.alpha_bar[static_cast<std::size_t>(t - 1)] * a;
    prev = sched.alpha_bar[static_cast<std::size_t>(t)];
  }
  return sched;
}

TransitionModel::TransitionModel(NoiseSchedule schedule, std::vector<double> marginals)
    : schedule_(std::move(schedule)), marginals_(std::move(marginals)) {
  if (marginals_.size() < 2) throw InvalidInputError("transition model: need at least 2 classes");
  double sum = 0.0;
  for (double m : marginals_) {
    if (m < 0.0) throw InvalidInputError("transition model: negative marginal");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInputError("transition model: marginals must sum to 1");
}

double TransitionModel::step_ratio(int s, int t) const {
  if (s < 0 || t > schedule_.t_steps || s >= t)
    throw InvalidInputError("step_ratio: need 0 <= s < t <= T");
  double r = 1.0;
  for (int u = s + 1; u <= t; ++u) r *= schedule_.alpha[static_cast<std::size_t>(u)];
  return r;
}

namespace {
Tensor marginal_kernel(double ratio, const std::vector<double>& m) {
  const int c = static_cast<int>(m.size());
  Tensor q({c, c});
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      q(i, j) = (1.0 - ratio) * m[static_cast<std::size_t>(j)] + (i == j ? ratio : 0.0);
  return q;
}
}  // namespace

Tensor TransitionModel::transition(int t) const {
  if (t < 1 || t > schedule_.t_steps) throw InvalidInputError("transition: t out of range");
  return marginal_kernel(schedule_.alpha[static_cast<std::size_t>(t)], marginals_);
}

Tensor TransitionModel::multi_step(int s, int t) const {
  return marginal_kernel(step_ratio(s, t), marginals_);
}

Tensor TransitionModel::cumulative(int t) const {
  if (t == 0) return marginal_kernel(1.0, marginals_);
  return multi_step(0, t);
}

std::vector<double> estimate_bond_marginals(std::span<const MolecularGraph> corpus, int n_classes) {
  if (corpus.empty()) throw InvalidInputError("marginals: empty corpus");
  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  long total = 0;
  for (const MolecularGraph& g : corpus) {
    for (int i = 0; i < g.n_atoms(); ++i)
      for (int j = i + 1; j < g.n_atoms(); ++j) {
        const int c = g.bond(i, j);
        if (c < 0 || c >= n_classes) throw InvalidInputError("marginals: bond class out of range");
        counts[static_cast<std::size_t>(c)] += 1.0;
        ++total;
      }
  }
  if (total == 0) throw InvalidInputError("marginals: corpus has no atom pairs");
  // Small floor keeps every class reachable so posteriors never divide by 0.
  const double floor = 1e-4;
  double sum = 0.0;
  for (double& c : counts) {
    c = c / static_cast<double>(total) + floor;
    sum += c;
  }
  for (double& c : counts) c /= sum;
  return counts;
}

MolecularGraph forward_corrupt(const MolecularGraph& clean, int t, const TransitionModel& model,
                               Rng& rng) {
  if (t < 0 || t > model.t_steps()) throw InvalidInputError("forward_corrupt: t out of range");
  MolecularGraph noisy(clean.atom_types());
  if (t == 0) return clean;
  const Tensor qbar = model.cumulative(t);
  const int c = model.n_classes();
  for (int i = 0; i < clean.n_atoms(); ++i)
    for (int j = i + 1; j < clean.n_atoms(); ++j) {
      const int from = clean.bond(i, j);
      const int to = rng.categorical(qbar.data() + static_cast<std::size_t>(from) * c, c);
      if (to != 0) noisy.set_bond(i, j, to);
    }
  return noisy;
}

std::vector<double> skipped_posterior(int e_t, int e0, int s, int t, const TransitionModel& model) {
  if (s < 0 || t > model.t_steps() || s >= t)
    throw InvalidInputError("skipped_posterior: need 0 <= s < t <= T");
  const int c = model.n_classes();
  if (e_t < 0 || e_t >= c || e0 < 0 || e0 >= c)
    throw InvalidInputError("skipped_posterior: class out of range");
  const Tensor fwd = model.multi_step(s, t);        // q(E_t | E_s)
  const Tensor prior = model.cumulative(s);         // q(E_s | E_0)
  std::vector<double> post(static_cast<std::size_t>(c));
  double norm = 0.0;
  for (int k = 0; k < c; ++k) {
    post[static_cast<std::size_t>(k)] = fwd(k, e_t) * prior(e0, k);
    norm += post[static_cast<std::size_t>(k)];
  }
  if (norm <= 0.0)
    throw NumericalError("skipped_posterior: impossible transition, zero normalizer");
  for (double& p : post) p /= norm;
  return post;
}

std::vector<double> unit_step_posterior(int e_t, int e0, int t, const TransitionModel& model) {
  if (t < 1 || t > model.t_steps()) throw InvalidInputError("unit_step_posterior: t out of range");
  const int c = model.n_classes();
  const Tensor q_t = model.transition(t);           // q(E_t | E_{t-1})
  const Tensor qbar_prev = model.cumulative(t - 1); // q(E_{t-1} | E_0)
  std::vector<double> post(static_cast<std::size_t>(c));
  double norm = 0.0;
  for (int k = 0; k < c; ++k) {
    post[static_cast<std::size_t>(k)] = q_t(k, e_t) * qbar_prev(e0, k);
    norm += post[static_cast<std::size_t>(k)];
  }
  if (norm <= 0.0)
    throw NumericalError("unit_step_posterior: impossible transition, zero normalizer");
  for (double& p : post) p /= norm;
  return post;
}

std::vector<double> model_posterior(std::span<const double> clean_probs, int e_t, int s, int t,
                                    const TransitionModel& model) {
  const int c = model.n_classes();
  if (static_cast<int>(clean_probs.size()) != c)
    throw InvalidInputError("model_posterior: clean distribution size mismatch");
  std::vector<double> out(static_cast<std::size_t>(c), 0.0);
  for (int e0 = 0; e0 < c; ++e0) {
    if (clean_probs[static_cast<std::size_t>(e0)] == 0.0) continue;
    const std::vector<double> post = skipped_posterior(e_t, e0, s, t, model);
    for (int k = 0; k < c; ++k)
      out[static_cast<std::size_t>(k)] += post[static_cast<std::size_t>(k)] * clean_probs[static_cast<std::size_t>(e0)];
  }
  return out;
}

Value training_loss(Value pair_logits, const std::vector<int>& clean_pair_classes) {
  if (clean_pair_classes.empty())
    throw InvalidInputError("training_loss: empty pair mask");
  return cross_entropy_mean(pair_logits, clean_pair_classes);
}

std::vector<int> pair_classes(const MolecularGraph& g, const LineGraphIndex& lg) {
  if (lg.n_atoms() != g.n_atoms())
    throw InvalidInputError("pair_classes: line graph size mismatch");
  std::vector<int> out(static_cast<std::size_t>(lg.m_nodes()));
  for (int u = 0; u < lg.m_nodes(); ++u) {
    const auto [i, j] = lg.pair(u);
    out[static_cast<std::size_t>(u)] = g.bond(i, j);
  }
  return out;
}

}  // namespace lgdiff
