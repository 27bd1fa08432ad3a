//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "lgdiff/autodiff.hpp"

namespace lgdiff {

struct AdamWConfig {
  double lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-12;
};

// AdamW with decoupled weight decay. Moment buffers start at zero and are
// keyed by parameter name so optimizer state can ride along in checkpoints.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg) : cfg_(cfg) {}

  void step(const std::vector<Parameter*>& params);

  long step_count() const { return step_count_; }
  const AdamWConfig& config() const { return cfg_; }

  struct Moments {
    Tensor m;
    Tensor v;
  };
  std::unordered_map<std::string, Moments>& state() { return state_; }
  void set_step_count(long t) { step_count_ = t; }

 private:
  AdamWConfig cfg_;
  std::unordered_map<std::string, Moments> state_;
  long step_count_ = 0;
};

// Global L2-norm gradient clipping; returns the pre-clip norm.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

}  // namespace lgdiff
