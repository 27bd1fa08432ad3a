//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace lgdiff {

namespace memstat {
namespace {
thread_local std::int64_t g_current = 0;
thread_local std::int64_t g_peak = 0;
}  // namespace

std::int64_t current_bytes() { return g_current; }
std::int64_t peak_bytes() { return g_peak; }
void reset_peak() { g_peak = g_current; }

namespace detail {
void on_alloc(std::int64_t bytes) {
  g_current += bytes;
  g_peak = std::max(g_peak, g_current);
}
void on_free(std::int64_t bytes) { g_current -= bytes; }
}  // namespace detail
}  // namespace memstat

std::string shape_string(const Tensor& t) {
  std::ostringstream oss;
  oss << '[';
  for (int i = 0; i < t.ndim(); ++i) {
    if (i) oss << 'x';
    oss << t.dim(i);
  }
  oss << ']';
  return oss.str();
}

namespace {
void require_2d(const Tensor& t, const char* who) {
  if (t.ndim() != 2) throw ShapeError(std::string(who) + ": expected rank-2 tensor, got " + shape_string(t));
}
}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions disagree, " + shape_string(a) + " vs " + shape_string(b));
  const int n = a.rows(), k = a.cols(), m = b.cols();
  Tensor c({n, m});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (int i = 0; i < n; ++i) {
    const double* ai = pa + static_cast<std::size_t>(i) * k;
    double* ci = pc + static_cast<std::size_t>(i) * m;
    for (int t = 0; t < k; ++t) {
      const double av = ai[t];
      if (av == 0.0) continue;
      const double* bt = pb + static_cast<std::size_t>(t) * m;
      for (int j = 0; j < m; ++j) ci[j] += av * bt[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul_nt");
  require_2d(b, "matmul_nt");
  if (a.cols() != b.cols())
    throw ShapeError("matmul_nt: inner dimensions disagree, " + shape_string(a) + " vs " + shape_string(b));
  const int n = a.rows(), k = a.cols(), m = b.rows();
  Tensor c({n, m});
  for (int i = 0; i < n; ++i) {
    const double* ai = a.data() + static_cast<std::size_t>(i) * k;
    double* ci = c.data() + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) {
      const double* bj = b.data() + static_cast<std::size_t>(j) * k;
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += ai[t] * bj[t];
      ci[j] = acc;
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul_tn");
  require_2d(b, "matmul_tn");
  if (a.rows() != b.rows())
    throw ShapeError("matmul_tn: inner dimensions disagree, " + shape_string(a) + " vs " + shape_string(b));
  const int n = a.cols(), k = a.rows(), m = b.cols();
  Tensor c({n, m});
  for (int t = 0; t < k; ++t) {
    const double* at = a.data() + static_cast<std::size_t>(t) * n;
    const double* bt = b.data() + static_cast<std::size_t>(t) * m;
    for (int i = 0; i < n; ++i) {
      const double av = at[i];
      if (av == 0.0) continue;
      double* ci = c.data() + static_cast<std::size_t>(i) * m;
      for (int j = 0; j < m; ++j) ci[j] += av * bt[j];
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  require_2d(a, "transpose");
  Tensor t({a.cols(), a.rows()});
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

void add_inplace(Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    throw ShapeError("add_inplace: shape mismatch, " + shape_string(a) + " vs " + shape_string(b));
  double* pa = a.data();
  const double* pb = b.data();
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) pa[i] += pb[i];
}

void scale_inplace(Tensor& a, double c) {
  double* pa = a.data();
  const std::int64_t n = a.numel();
  for (std::int64_t i = 0; i < n; ++i) pa[i] *= c;
}

double log_sum_exp(const double* x, int n) {
  double m = x[0];
  for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

void softmax_inplace(double* x, int n) {
  double m = x[0];
  for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = std::exp(x[i] - m);
    s += x[i];
  }
  for (int i = 0; i < n; ++i) x[i] /= s;
}

int argmax(const double* x, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

}  // namespace lgdiff
