//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>
#include <vector>

#include "lgdiff/checkpoint.hpp"
#include "lgdiff/run_config.hpp"

namespace lgdiff {

struct TrainResult {
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Fingerprint-conditioned clean-bond prediction: per step draw a molecule
// and a uniform timestep, corrupt the bonds, run the denoiser conditioned on
// the clean molecule's fingerprint, and take cross-entropy against the clean
// bond classes. Throws NumericalError if the loss goes non-finite.
TrainResult train_model(DenoiserParams& params, const TransitionModel& model,
                        const std::vector<MolecularGraph>& corpus, const RunConfig& cfg,
                        AdamW& optimizer, const EpochCallback& on_epoch = {});

// Mean loss over the corpus without updates (the "initial loss" reference).
double evaluate_loss(const DenoiserParams& params, const TransitionModel& model,
                     const std::vector<MolecularGraph>& corpus, const RunConfig& cfg,
                     std::uint64_t rng_stream);

// Checkpoint layout: parameters under "param/", diffusion state under
// "diffusion/", optimizer moments under "adam_m/" and "adam_v/".
Checkpoint make_checkpoint(const DenoiserParams& params, const TransitionModel& model,
                           const RunConfig& cfg, const AdamW* optimizer = nullptr);
void load_params(const Checkpoint& ck, DenoiserParams& params);
TransitionModel load_transition_model(const Checkpoint& ck);
void load_optimizer(const Checkpoint& ck, const DenoiserParams& params, AdamW& optimizer);

}  // namespace lgdiff
