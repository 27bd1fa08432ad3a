//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/optim.hpp"

#include <cmath>

namespace lgdiff {

void AdamW::step(const std::vector<Parameter*>& params) {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (Parameter* p : params) {
    if (!p->grad.all_finite())
      throw NumericalError("adamw: non-finite gradient for parameter '" + p->name + "'");
    auto& mom = state_[p->name];
    if (mom.m.empty()) {
      mom.m = Tensor(p->value.shape());
      mom.v = Tensor(p->value.shape());
    }
    const std::int64_t n = p->value.numel();
    for (std::int64_t i = 0; i < n; ++i) {
      const double g = p->grad[i];
      mom.m[i] = cfg_.beta1 * mom.m[i] + (1.0 - cfg_.beta1) * g;
      mom.v[i] = cfg_.beta2 * mom.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = mom.m[i] / bc1;
      const double vhat = mom.v[i] / bc2;
      p->value[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * p->value[i]);
    }
  }
}

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params)
    for (std::int64_t i = 0; i < p->grad.numel(); ++i) sq += p->grad[i] * p->grad[i];
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (Parameter* p : params)
      for (std::int64_t i = 0; i < p->grad.numel(); ++i) p->grad[i] *= s;
  }
  return norm;
}

}  // namespace lgdiff
