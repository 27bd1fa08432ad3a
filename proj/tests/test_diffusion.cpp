//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common/test_support.hpp"
#include "lgdiff/diffusion.hpp"

using namespace lgdiff;
using lgdiff::testing::max_abs_diff;
using lgdiff::testing::random_graph;

namespace {

const std::vector<double> kMarginals = {0.55, 0.18, 0.12, 0.05, 0.10};

TransitionModel toy_model(int t_steps) {
  return TransitionModel(build_cosine_schedule(t_steps), kMarginals);
}

// Path-enumeration oracle for q(E_t = et | E_s = es): sum the probability of
// every intermediate class sequence through the unit-step kernels.
double chain_probability(const TransitionModel& model, int es, int et, int s, int t) {
  std::vector<double> dist(static_cast<std::size_t>(model.n_classes()), 0.0);
  dist[static_cast<std::size_t>(es)] = 1.0;
  for (int u = s + 1; u <= t; ++u) {
    const Tensor q = model.transition(u);
    std::vector<double> next(dist.size(), 0.0);
    for (int a = 0; a < model.n_classes(); ++a)
      for (int b = 0; b < model.n_classes(); ++b)
        next[static_cast<std::size_t>(b)] += dist[static_cast<std::size_t>(a)] * q(a, b);
    dist = std::move(next);
  }
  return dist[static_cast<std::size_t>(et)];
}

}  // namespace

TEST_CASE("cosine schedule: endpoints, monotonicity, formula") {
  CHECK_THROWS_AS(build_cosine_schedule(0), InvalidInputError);

  const NoiseSchedule s500 = build_cosine_schedule(500);
  CHECK(s500.alpha_bar[0] == 1.0);
  for (int t = 1; t <= 500; ++t) {
    CHECK(s500.alpha_bar[static_cast<std::size_t>(t)] < s500.alpha_bar[static_cast<std::size_t>(t - 1)]);
    CHECK(s500.alpha[static_cast<std::size_t>(t)] > 0.0);
    CHECK(s500.alpha[static_cast<std::size_t>(t)] < 1.0);
  }

  // Direct formula evaluation at T=10, t=5, s=0.008.
  const NoiseSchedule s10 = build_cosine_schedule(10, 0.008);
  auto f = [](double t) {
    const double x = (t / 10.0 + 0.008) / 1.008 * M_PI / 2.0;
    return std::cos(x) * std::cos(x);
  };
  CHECK(s10.alpha_bar[5] == doctest::Approx(f(5.0) / f(0.0)).epsilon(1e-12));
}

TEST_CASE("transition matrices: identity and stationary limits") {
  const TransitionModel model = toy_model(8);
  const int c = model.n_classes();

  // alpha -> 1 gives the identity; alpha -> 0 sends every row to m.
  const Tensor qbar0 = model.cumulative(0);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) CHECK(qbar0(i, j) == (i == j ? 1.0 : 0.0));

  TransitionModel frozen(
      [] {
        NoiseSchedule s;
        s.t_steps = 1;
        s.alpha = {1.0, 1e-6};
        s.alpha_bar = {1.0, 1e-6};
        return s;
      }(),
      kMarginals);
  const Tensor q = frozen.transition(1);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      CHECK(q(i, j) == doctest::Approx(kMarginals[static_cast<std::size_t>(j)]).epsilon(1e-4));

  CHECK_THROWS_AS(TransitionModel(build_cosine_schedule(4), std::vector<double>{0.7, 0.7}),
                  InvalidInputError);
}

TEST_CASE("diffusion algebra at T=8: stochasticity, stationarity, closure, Bayes") {
  const TransitionModel model = toy_model(8);
  const int c = model.n_classes();
  const int t_steps = 8;

  for (int t = 1; t <= t_steps; ++t) {
    const Tensor q = model.transition(t);
    for (int i = 0; i < c; ++i) {
      double row = 0.0;
      for (int j = 0; j < c; ++j) row += q(i, j);
      CHECK(std::abs(row - 1.0) < 1e-12);
    }
    // m^T Q = m^T.
    for (int j = 0; j < c; ++j) {
      double mj = 0.0;
      for (int i = 0; i < c; ++i) mj += kMarginals[static_cast<std::size_t>(i)] * q(i, j);
      CHECK(std::abs(mj - kMarginals[static_cast<std::size_t>(j)]) < 1e-12);
    }
  }

  // Qbar(t) = Qbar(t-1) Q(t).
  for (int t = 1; t <= t_steps; ++t) {
    const Tensor lhs = model.cumulative(t);
    const Tensor rhs = matmul(model.cumulative(t - 1), model.transition(t));
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }

  // Composition closure for all 0 <= s < u < t <= T.
  for (int s = 0; s < t_steps; ++s)
    for (int u = s + 1; u < t_steps; ++u)
      for (int t = u + 1; t <= t_steps; ++t) {
        const Tensor direct = model.multi_step(s, t);
        const Tensor composed = matmul(model.multi_step(s, u), model.multi_step(u, t));
        CHECK(max_abs_diff(direct, composed) < 1e-12);
        // Marginal stationarity of the multi-step matrix.
        for (int j = 0; j < c; ++j) {
          double mj = 0.0;
          for (int i = 0; i < c; ++i) mj += kMarginals[static_cast<std::size_t>(i)] * direct(i, j);
          CHECK(std::abs(mj - kMarginals[static_cast<std::size_t>(j)]) < 1e-12);
        }
      }

  // Bayes consistency: sum_es q(et|es) q(es|e0) = q(et|e0).
  for (int t = 1; t <= t_steps; ++t)
    for (int s = 0; s < t; ++s)
      for (int e0 = 0; e0 < c; ++e0)
        for (int et = 0; et < c; ++et) {
          const Tensor fwd = model.multi_step(s, t);
          const Tensor prior = model.cumulative(s);
          const Tensor direct = model.cumulative(t);
          double total = 0.0;
          for (int es = 0; es < c; ++es) total += fwd(es, et) * prior(e0, es);
          CHECK(std::abs(total - direct(e0, et)) < 1e-12);
        }

  // Unit-step product equals the closed form (brute-force product oracle).
  Tensor running = model.cumulative(0);
  for (int t = 1; t <= t_steps; ++t) {
    running = matmul(running, model.transition(t));
    CHECK(max_abs_diff(running, model.cumulative(t)) < 1e-12);
  }

  CHECK_THROWS_AS(model.multi_step(3, 3), InvalidInputError);
  CHECK_THROWS_AS(model.multi_step(4, 2), InvalidInputError);
}

TEST_CASE("multi-step at s = t-1 is bit-identical to the unit step") {
  const TransitionModel model = toy_model(8);
  for (int t = 1; t <= 8; ++t)
    CHECK(max_abs_diff(model.multi_step(t - 1, t), model.transition(t)) == 0.0);
}

TEST_CASE("forward corruption: identity at t=0, marginal convergence, symmetry, determinism") {
  const TransitionModel model = toy_model(50);
  Rng rng(5);
  const MolecularGraph clean = random_graph(6, rng);

  Rng r0(9);
  CHECK(forward_corrupt(clean, 0, model, r0) == clean);

  Rng r1(10), r2(10);
  const MolecularGraph a = forward_corrupt(clean, 25, model, r1);
  const MolecularGraph b = forward_corrupt(clean, 25, model, r2);
  CHECK(a == b);
  for (int i = 0; i < a.n_atoms(); ++i) {
    CHECK(a.bond(i, i) == 0);
    for (int j = 0; j < a.n_atoms(); ++j) CHECK(a.bond(i, j) == a.bond(j, i));
  }

  // At t = T the empirical class frequencies approach the marginals.
  Rng r3(11);
  std::vector<double> counts(5, 0.0);
  const int trials = 20000;
  MolecularGraph two(std::vector<int>{0, 0});
  two.set_bond(0, 1, 2);
  for (int k = 0; k < trials; ++k) {
    const MolecularGraph noisy = forward_corrupt(two, 50, model, r3);
    counts[static_cast<std::size_t>(noisy.bond(0, 1))] += 1.0;
  }
  for (int cls = 0; cls < 5; ++cls) {
    const double p = counts[static_cast<std::size_t>(cls)] / trials;
    const double expect = kMarginals[static_cast<std::size_t>(cls)];
    const double sigma = std::sqrt(expect * (1 - expect) / trials);
    CHECK(std::abs(p - expect) < 3.5 * sigma + 1e-3);
  }
}

TEST_CASE("skipped posterior matches the path-enumeration oracle at T=6") {
  const TransitionModel model = toy_model(6);
  const int c = model.n_classes();
  for (int t = 1; t <= 6; ++t)
    for (int s = 0; s < t; ++s)
      for (int e0 = 0; e0 < c; ++e0)
        for (int et = 0; et < c; ++et) {
          const std::vector<double> post = skipped_posterior(et, e0, s, t, model);
          double norm_check = 0.0;
          for (double p : post) norm_check += p;
          CHECK(std::abs(norm_check - 1.0) < 1e-12);

          // Oracle: q(es|et,e0) = q(et|es) q(es|e0) / q(et|e0) with every
          // factor computed by explicit chain enumeration.
          const double denom = chain_probability(model, e0, et, 0, t);
          for (int es = 0; es < c; ++es) {
            const double want = chain_probability(model, es, et, s, t) *
                                chain_probability(model, e0, es, 0, s) / denom;
            CHECK(std::abs(post[static_cast<std::size_t>(es)] - want) < 1e-12);
          }
        }
}

TEST_CASE("skipped posterior at s = t-1 equals the unit-step posterior exactly") {
  const TransitionModel model = toy_model(6);
  for (int t = 1; t <= 6; ++t)
    for (int e0 = 0; e0 < model.n_classes(); ++e0)
      for (int et = 0; et < model.n_classes(); ++et) {
        const std::vector<double> skipped = skipped_posterior(et, e0, t - 1, t, model);
        const std::vector<double> unit = unit_step_posterior(et, e0, t, model);
        for (int es = 0; es < model.n_classes(); ++es)
          CHECK(skipped[static_cast<std::size_t>(es)] == unit[static_cast<std::size_t>(es)]);
      }
}

TEST_CASE("skipped posterior is a point mass on e0 when alpha_bar(s) = 1") {
  const TransitionModel model = toy_model(6);
  for (int e0 = 0; e0 < model.n_classes(); ++e0)
    for (int et = 0; et < model.n_classes(); ++et) {
      const std::vector<double> post = skipped_posterior(et, e0, 0, 3, model);
      for (int es = 0; es < model.n_classes(); ++es)
        CHECK(post[static_cast<std::size_t>(es)] == doctest::Approx(es == e0 ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("model posterior: point mass, normalization, uniform averaging") {
  const TransitionModel model = toy_model(6);
  const int c = model.n_classes();
  const int s = 2, t = 5, et = 3;

  std::vector<double> point(static_cast<std::size_t>(c), 0.0);
  point[1] = 1.0;
  const std::vector<double> from_point = model_posterior(point, et, s, t, model);
  const std::vector<double> direct = skipped_posterior(et, 1, s, t, model);
  for (int es = 0; es < c; ++es)
    CHECK(from_point[static_cast<std::size_t>(es)] == doctest::Approx(direct[static_cast<std::size_t>(es)]).epsilon(1e-15));

  std::vector<double> uniform(static_cast<std::size_t>(c), 1.0 / c);
  const std::vector<double> mixed = model_posterior(uniform, et, s, t, model);
  double total = 0.0;
  std::vector<double> mean(static_cast<std::size_t>(c), 0.0);
  for (int e0 = 0; e0 < c; ++e0) {
    const std::vector<double> post = skipped_posterior(et, e0, s, t, model);
    for (int es = 0; es < c; ++es) mean[static_cast<std::size_t>(es)] += post[static_cast<std::size_t>(es)] / c;
  }
  for (int es = 0; es < c; ++es) {
    total += mixed[static_cast<std::size_t>(es)];
    CHECK(mixed[static_cast<std::size_t>(es)] == doctest::Approx(mean[static_cast<std::size_t>(es)]).epsilon(1e-12));
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("training loss: perfect, uniform, and random-case oracle") {
  Graph g;
  // Perfect one-hot logits drive the loss to zero.
  Tensor sharp({3, 5});
  sharp(0, 2) = 80.0;
  sharp(1, 0) = 80.0;
  sharp(2, 4) = 80.0;
  CHECK(training_loss(g.constant(sharp), {2, 0, 4}).val()[0] < 1e-12);

  // Uniform logits over 5 classes give ln 5.
  CHECK(training_loss(g.constant(Tensor({4, 5})), {0, 1, 2, 3}).val()[0] ==
        doctest::Approx(std::log(5.0)).epsilon(1e-12));

  // Random case against a per-pair summation oracle.
  Rng rng(13);
  const Tensor logits = lgdiff::testing::random_tensor({6, 5}, rng, 2.0);
  const std::vector<int> targets = {0, 4, 2, 2, 1, 3};
  double expect = 0.0;
  for (int i = 0; i < 6; ++i) {
    double lse = log_sum_exp(logits.data() + static_cast<std::size_t>(i) * 5, 5);
    expect += lse - logits(i, targets[static_cast<std::size_t>(i)]);
  }
  expect /= 6.0;
  CHECK(training_loss(g.constant(logits), targets).val()[0] == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(training_loss(g.constant(Tensor({0, 5})), {}), InvalidInputError);
}

TEST_CASE("marginal estimation includes the no-bond class") {
  Rng rng(17);
  std::vector<MolecularGraph> corpus;
  for (int i = 0; i < 30; ++i) corpus.push_back(random_graph(5, rng));
  const std::vector<double> m = estimate_bond_marginals(corpus, 5);
  double sum = 0.0;
  for (double v : m) {
    CHECK(v > 0.0);
    sum += v;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(m[0] > m[3]);  // no-bond dominates triple bonds in sparse graphs
}
