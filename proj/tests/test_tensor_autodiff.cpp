//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common/test_support.hpp"
#include "lgdiff/autodiff.hpp"
#include "lgdiff/optim.hpp"

using namespace lgdiff;
using lgdiff::testing::fd_check;
using lgdiff::testing::max_abs_diff;
using lgdiff::testing::random_tensor;
using lgdiff::testing::rel_error;

namespace {

// Gradient check harness for a single op: loss = sum(op(params...) * W)
// with a fixed random weighting W so every output coordinate matters.
double op_fd(const std::vector<Parameter*>& params,
             const std::function<Value(Graph&)>& build, double step = 1e-5) {
  Graph probe;
  const Tensor w = [&] {
    Graph g;
    Value out = build(g);
    Rng rng(99);
    return random_tensor(out.val().shape(), rng);
  }();
  auto loss_value = [&]() {
    Graph g;
    Value out = build(g);
    Value loss = sum_all(mul(out, g.constant(w)));
    return loss.val()[0];
  };
  auto backward = [&]() {
    Graph g;
    Value out = build(g);
    Value loss = sum_all(mul(out, g.constant(w)));
    g.backward(loss);
  };
  Rng rng(7);
  return fd_check(params, loss_value, backward, step, rng, 12).worst_rel;
}

}  // namespace

TEST_CASE("tensor shapes and storage") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  t(1, 2) = 5.0;
  CHECK(t[5] == 5.0);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0}), ShapeError);
  CHECK(Tensor::scalar(3.5)[0] == 3.5);
}

TEST_CASE("plain matmul agrees with hand computation") {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b({3, 2}, {7, 8, 9, 10, 11, 12});
  Tensor c = matmul(a, b);
  CHECK(c(0, 0) == doctest::Approx(58));
  CHECK(c(0, 1) == doctest::Approx(64));
  CHECK(c(1, 0) == doctest::Approx(139));
  CHECK(c(1, 1) == doctest::Approx(154));
  CHECK(max_abs_diff(matmul_nt(a, transpose(b)), c) == 0.0);
  CHECK(max_abs_diff(matmul_tn(transpose(a), b), c) == 0.0);
  CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("softmax of zeros is uniform") {
  Graph g;
  Value s = softmax_rows(g.constant(Tensor({1, 3})));
  for (int j = 0; j < 3; ++j) CHECK(s.val()(0, j) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("softmax rows sum to one within 1e-12") {
  Rng rng(3);
  Graph g;
  Value s = softmax_rows(g.constant(random_tensor({6, 9}, rng, 3.0)));
  for (int i = 0; i < 6; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 9; ++j) sum += s.val()(i, j);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("masked softmax zeroes masked entries and rejects dead rows") {
  Rng rng(4);
  Tensor mask({2, 4}, {1, 0, 1, 0, 0, 1, 1, 1});
  Graph g;
  Value s = masked_softmax_rows(g.constant(random_tensor({2, 4}, rng)), mask);
  CHECK(s.val()(0, 1) == 0.0);
  CHECK(s.val()(0, 3) == 0.0);
  CHECK(s.val()(1, 0) == 0.0);
  for (int i = 0; i < 2; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) sum += s.val()(i, j);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  Tensor dead({1, 2}, {0, 0});
  Graph g2;
  CHECK_THROWS_AS(masked_softmax_rows(g2.constant(Tensor({1, 2})), dead), InvalidInputError);
}

TEST_CASE("layer norm maps constant rows to zero") {
  Graph g;
  Value out = layer_norm(g.constant(Tensor::full({2, 5}, 3.25)));
  for (std::int64_t i = 0; i < out.val().numel(); ++i) CHECK(out.val()[i] == 0.0);
}

TEST_CASE("per-op gradients match central finite differences") {
  Rng rng(11);
  Parameter a("a", random_tensor({3, 4}, rng));
  Parameter b("b", random_tensor({4, 2}, rng));
  Parameter v("v", random_tensor({1, 4}, rng));
  Parameter c("c", random_tensor({3, 1}, rng));
  Parameter p("p", random_tensor({3, 4}, rng, 0.8));

  SUBCASE("matmul") {
    const double err = op_fd({&a, &b}, [&](Graph& g) { return matmul(g.param(a), g.param(b)); });
    CHECK(err < 1e-6);
  }
  SUBCASE("add mul broadcast") {
    const double err = op_fd({&a, &v, &c}, [&](Graph& g) {
      return mul_colvec(add_rowvec(mul(g.param(a), g.param(a)), g.param(v)), g.param(c));
    });
    CHECK(err < 1e-6);
  }
  SUBCASE("gelu") {
    const double err = op_fd({&p}, [&](Graph& g) { return gelu(g.param(p)); });
    CHECK(err < 1e-6);
  }
  SUBCASE("exp log reciprocal") {
    const double err = op_fd({&p}, [&](Graph& g) {
      return log(add_scalar(exp(g.param(p)), 1.0));
    });
    CHECK(err < 1e-6);
    const double err2 = op_fd({&p}, [&](Graph& g) {
      return reciprocal(add_scalar(mul(g.param(p), g.param(p)), 1.0));
    });
    CHECK(err2 < 1e-6);
  }
  SUBCASE("layer_norm") {
    const double err = op_fd({&a}, [&](Graph& g) { return layer_norm(g.param(a)); });
    CHECK(err < 1e-5);
  }
  SUBCASE("softmax") {
    const double err = op_fd({&a}, [&](Graph& g) { return softmax_rows(g.param(a)); });
    CHECK(err < 1e-5);
  }
  SUBCASE("masked softmax") {
    Tensor mask({3, 4}, {1, 1, 0, 1, 0, 1, 1, 0, 1, 1, 1, 1});
    const double err =
        op_fd({&a}, [&, mask](Graph& g) { return masked_softmax_rows(g.param(a), mask); });
    CHECK(err < 1e-5);
  }
  SUBCASE("reductions slices concat") {
    const double err = op_fd({&a}, [&](Graph& g) {
      Value x = g.param(a);
      Value parts = concat_cols({slice_cols(x, 0, 2), slice_cols(x, 2, 2)});
      Value pooled = concat_cols({mean_over_axis(parts, 0), sum_over_axis(parts, 0)});
      return concat_cols({pooled, transpose(sum_over_axis(parts, 1))});
    });
    CHECK(err < 1e-6);
  }
  SUBCASE("gather and transpose") {
    const double err = op_fd({&a}, [&](Graph& g) {
      return gather_rows(g.param(a), {2, 0, 0, 1});
    });
    CHECK(err < 1e-6);
  }
  SUBCASE("cross entropy") {
    const double err = op_fd({&a}, [&](Graph& g) {
      return cross_entropy_mean(g.param(a), {1, 3, 0});
    });
    CHECK(err < 1e-6);
  }
}

TEST_CASE("cross entropy values") {
  Graph g;
  // Uniform logits over 4 classes -> ln 4.
  Value uniform = cross_entropy_mean(g.constant(Tensor({2, 4})), {0, 3});
  CHECK(uniform.val()[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  Tensor sharp({1, 3});
  sharp(0, 1) = 60.0;
  Value perfect = cross_entropy_mean(g.constant(sharp), {1});
  CHECK(perfect.val()[0] < 1e-9);
}

TEST_CASE("backward: sum of squares and detached parameters") {
  Rng rng(5);
  Parameter p("p", random_tensor({2, 3}, rng));
  Parameter unused("unused", random_tensor({2, 2}, rng));
  p.zero_grad();
  unused.zero_grad();
  Graph g;
  Value x = g.param(p);
  Value loss = sum_all(mul(x, x));
  g.backward(loss);
  for (std::int64_t i = 0; i < p.value.numel(); ++i)
    CHECK(p.grad[i] == doctest::Approx(2.0 * p.value[i]).epsilon(1e-12));
  for (std::int64_t i = 0; i < unused.grad.numel(); ++i) CHECK(unused.grad[i] == 0.0);
}

TEST_CASE("backward rejects non-scalar loss and double invocation") {
  Graph g;
  Value v = g.constant(Tensor({2, 2}));
  CHECK_THROWS_AS(g.backward(v), InvalidInputError);
  Graph g2;
  Parameter p("p", Tensor::full({1, 1}, 2.0));
  Value loss = mul(g2.param(p), g2.param(p));
  g2.backward(loss);
  CHECK_THROWS_AS(g2.backward(loss), InvalidInputError);
}

TEST_CASE("two-layer MLP gradient matches finite differences") {
  Rng rng(21);
  Parameter w1("w1", random_tensor({5, 7}, rng, 0.5));
  Parameter b1("b1", random_tensor({1, 7}, rng, 0.1));
  Parameter w2("w2", random_tensor({7, 3}, rng, 0.5));
  Parameter b2("b2", random_tensor({1, 3}, rng, 0.1));
  const Tensor input = random_tensor({4, 5}, rng);

  auto build = [&](Graph& g) {
    Value h = gelu(add_rowvec(matmul(g.constant(input), g.param(w1)), g.param(b1)));
    Value logits = add_rowvec(matmul(h, g.param(w2)), g.param(b2));
    return cross_entropy_mean(logits, {0, 2, 1, 2});
  };
  auto loss_value = [&]() {
    Graph g;
    return build(g).val()[0];
  };
  auto backward = [&]() {
    Graph g;
    g.backward(build(g));
  };
  Rng probe(3);
  const auto report = fd_check({&w1, &b1, &w2, &b2}, loss_value, backward, 1e-5, probe, 64);
  CHECK(report.worst_rel < 1e-4);
  CHECK(report.checked > 30);
}

TEST_CASE("determinism: identical seeds give bit-identical forward and gradients") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    Parameter w("w", random_tensor({6, 6}, rng, 0.3));
    w.zero_grad();
    Graph g;
    Value out = softmax_rows(matmul(gelu(g.param(w)), g.param(w)));
    Value loss = sum_all(mul(out, out));
    g.backward(loss);
    return std::make_pair(loss.val()[0], w.grad);
  };
  auto [l1, g1] = run(42);
  auto [l2, g2] = run(42);
  CHECK(l1 == l2);
  CHECK(max_abs_diff(g1, g2) == 0.0);
}

TEST_CASE("adamw: zero gradient with zero weight decay leaves parameters unchanged") {
  Parameter p("p", Tensor::full({2, 2}, 1.5));
  p.zero_grad();
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt(cfg);
  opt.step({&p});
  for (std::int64_t i = 0; i < p.value.numel(); ++i) CHECK(p.value[i] == 1.5);
}

TEST_CASE("adamw: constant gradient moves parameter against its sign") {
  Parameter p("p", Tensor::full({1, 1}, 0.0));
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt(cfg);
  for (int step = 0; step < 25; ++step) {
    p.grad.fill(2.0);
    opt.step({&p});
  }
  CHECK(p.value[0] < 0.0);
}

TEST_CASE("adamw: three hand-computed steps on a scalar") {
  const double lr = 0.1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8, wd = 0.01;
  const double grads[3] = {0.4, -0.2, 0.7};

  // Independent recurrence.
  double x = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 3; ++t) {
    const double gval = grads[t - 1];
    m = beta1 * m + (1 - beta1) * gval;
    v = beta2 * v + (1 - beta2) * gval * gval;
    const double mhat = m / (1 - std::pow(beta1, t));
    const double vhat = v / (1 - std::pow(beta2, t));
    x -= lr * (mhat / (std::sqrt(vhat) + eps) + wd * x);
  }

  Parameter p("p", Tensor::full({1, 1}, 1.0));
  AdamW opt({lr, beta1, beta2, eps, wd});
  for (int t = 0; t < 3; ++t) {
    p.grad.fill(grads[t]);
    opt.step({&p});
  }
  CHECK(p.value[0] == doctest::Approx(x).epsilon(1e-14));
}

TEST_CASE("adamw aborts on non-finite gradients with the parameter name") {
  Parameter p("layer0/q.w", Tensor::full({1, 1}, 1.0));
  p.grad.fill(std::numeric_limits<double>::quiet_NaN());
  AdamW opt({});
  CHECK_THROWS_WITH_AS(opt.step({&p}), doctest::Contains("layer0/q.w"), NumericalError);
}

TEST_CASE("dropout is identity in deterministic mode and rescales otherwise") {
  Rng rng(8);
  const Tensor x = random_tensor({100, 8}, rng);
  Graph g;
  Value kept = dropout(g.constant(x), 0.5, nullptr);
  CHECK(max_abs_diff(kept.val(), x) == 0.0);

  set_deterministic_eval(false);
  Rng drop_rng(9);
  Graph g2;
  Value dropped = dropout(g2.constant(x), 0.5, &drop_rng);
  int zeros = 0;
  for (std::int64_t i = 0; i < dropped.val().numel(); ++i)
    if (dropped.val()[i] == 0.0) ++zeros;
  set_deterministic_eval(true);
  CHECK(zeros > 300);
  CHECK(zeros < 500);
}
