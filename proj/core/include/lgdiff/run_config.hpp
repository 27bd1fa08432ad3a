//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>

#include "lgdiff/denoiser.hpp"
#include "lgdiff/optim.hpp"
#include "lgdiff/sampler.hpp"

namespace lgdiff {

// Everything a run needs, serialized into every output artifact. The config
// hash covers the model-defining subset (denoiser dims, diffusion process,
// fingerprint layout, vocab) so checkpoints, corpora and candidate sets can
// refuse mismatched combinations while sampling knobs stay free.
struct RunConfig {
  std::uint64_t seed = 1;

  DenoiserConfig denoiser;

  struct Diffusion {
    int t_steps = 50;
    double cosine_offset = 0.008;
  } diffusion;

  struct Train {
    AdamWConfig optim;
    int epochs = 20;
    int batch_size = 16;
    double grad_clip = 1.0;
  } train;

  struct Sample {
    int n_candidates = 100;
    int j_steps = 0;  // 0 means full T
    JumpSpacing spacing = JumpSpacing::uniform;
    bool filter_valence = false;
    int n_threads = 4;
  } sample;

  struct FingerprintCfg {
    int radius = 2;
    int n_bits = 2048;
  } fingerprint;

  struct Corpus {
    int n_molecules = 500;
    int min_atoms = 3;
    int max_atoms = 7;
  } corpus;

  void validate() const;
  std::uint64_t config_hash() const;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load_file(const std::string& path);
  void save_file(const std::string& path) const;

  static RunConfig desk_default();
  static RunConfig reference();
};

}  // namespace lgdiff
