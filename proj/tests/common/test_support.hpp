//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test suites: relative-error math, random inputs,
// central finite differences, and small graph builders.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lgdiff/autodiff.hpp"
#include "lgdiff/molgraph.hpp"
#include "lgdiff/rng.hpp"
#include "lgdiff/tensor.hpp"

namespace lgdiff::testing {

inline double rel_error(double got, double want) {
  const double denom = std::max({std::abs(got), std::abs(want), 1e-8});
  return std::abs(got - want) / denom;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Tensor random_tensor(std::vector<int> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.normal() * scale;
  return t;
}

// Central finite differences against analytic gradients. `loss_fn` must
// recompute the scalar loss from the current parameter values; gradients are
// produced by one analytic backward pass before probing. Checks up to
// `coords_per_param` coordinates of every parameter.
struct FdReport {
  double worst_rel = 0.0;
  int checked = 0;
};

inline FdReport fd_check(const std::vector<Parameter*>& params,
                         const std::function<double()>& loss_fn,
                         const std::function<void()>& backward_fn, double step, Rng& rng,
                         int coords_per_param = 8) {
  for (Parameter* p : params) p->zero_grad();
  backward_fn();
  FdReport report;
  for (Parameter* p : params) {
    const std::int64_t n = p->value.numel();
    for (int probe = 0; probe < std::min<std::int64_t>(coords_per_param, n); ++probe) {
      const std::int64_t i =
          n <= coords_per_param ? probe : static_cast<std::int64_t>(rng.uniform_int(static_cast<int>(n)));
      const double saved = p->value[i];
      p->value[i] = saved + step;
      const double up = loss_fn();
      p->value[i] = saved - step;
      const double down = loss_fn();
      p->value[i] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double analytic = p->grad[i];
      const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
      report.worst_rel = std::max(report.worst_rel, std::abs(fd - analytic) / denom);
      ++report.checked;
    }
  }
  return report;
}

// Random symmetric bond assignment; not necessarily chemically valid.
inline MolecularGraph random_graph(int n_atoms, Rng& rng, int n_atom_types = 5,
                                   int n_bond_classes = 5, double bond_rate = 0.45) {
  std::vector<int> types(static_cast<std::size_t>(n_atoms));
  for (int i = 0; i < n_atoms; ++i) types[static_cast<std::size_t>(i)] = rng.uniform_int(n_atom_types);
  MolecularGraph g(types);
  for (int i = 0; i < n_atoms; ++i)
    for (int j = i + 1; j < n_atoms; ++j)
      if (rng.uniform() < bond_rate) g.set_bond(i, j, 1 + rng.uniform_int(n_bond_classes - 1));
  return g;
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
  return perm;
}

// Relabel atoms: atom i of the result is atom perm[i] of the input.
inline MolecularGraph permute_graph(const MolecularGraph& g, const std::vector<int>& perm) {
  std::vector<int> types(static_cast<std::size_t>(g.n_atoms()));
  for (int i = 0; i < g.n_atoms(); ++i)
    types[static_cast<std::size_t>(i)] = g.atom_type(perm[static_cast<std::size_t>(i)]);
  MolecularGraph out(types);
  for (int i = 0; i < g.n_atoms(); ++i)
    for (int j = i + 1; j < g.n_atoms(); ++j) {
      const int b = g.bond(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      if (b > 0) out.set_bond(i, j, b);
    }
  return out;
}

}  // namespace lgdiff::testing
