//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lgdiff/autodiff.hpp"
#include "lgdiff/diffusion.hpp"
#include "lgdiff/fastattn.hpp"
#include "lgdiff/molgraph.hpp"

namespace lgdiff {

enum class AttentionKernel { exact, linear };

struct DenoiserConfig {
  int n_layers = 3;
  int d_x = 64;
  int d_e = 32;
  int d_y = 128;
  int heads_primal = 4;
  int heads_line = 4;
  int heads_cross = 4;
  int n_bond_classes = 5;  // b+1
  int n_atom_types = 5;
  int ffn_x = 128;
  int ffn_e = 64;
  int d_cond = 2048;
  int t_embed_dim = 64;
  AttentionKernel kernel = AttentionKernel::exact;
  int n_random_features = 128;
  double dropout = 0.0;
  double attn_dropout = 0.0;
  double drop_path = 0.0;

  void validate() const;

  // CPU-trainable desk defaults.
  static DenoiserConfig desk();
  // Full-size reference configuration (K=5, 256/64/1024, 8 heads).
  static DenoiserConfig reference();
};

struct LinearP {
  Parameter* w = nullptr;
  Parameter* b = nullptr;  // null for bias-free maps
};

struct NormP {
  Parameter* gamma = nullptr;
  Parameter* beta = nullptr;
};

struct PrimalLayerP {
  NormP ln_attn;
  LinearP q, k, v, o;
  LinearP edge_score;   // d_e -> heads, additive pre-softmax modulation
  LinearP edge_update;  // heads -> d_e, residual edge refresh
  NormP ln_ffn;
  LinearP ffn1, ffn2;
  LinearP pool_score, pool_proj;
};

struct LineLayerP {
  NormP ln_attn;
  LinearP q, k, v, o;
  NormP ln_ffn;
  LinearP ffn1, ffn2;
  LinearP pool_score, pool_proj;
};

struct CrossAtomsFromBondsP {
  LinearP q, k, v, o;  // bias-free
};

struct CrossBondsFromAtomsP {
  LinearP q, k, v, o;  // bias-free
};

struct FilmP {
  LinearP gamma_p, beta_p;  // d_y -> d_x
  LinearP gamma_l, beta_l;  // d_y -> d_e
};

struct FusionP {
  LinearP proj;  // (2 d_y + d_x + d_e) -> d_y
  NormP ln;
};

struct DenoiserLayerP {
  FilmP film;
  PrimalLayerP primal;
  LineLayerP line;
  CrossAtomsFromBondsP atoms_from_bonds;
  CrossBondsFromAtomsP bonds_from_atoms;
  FusionP fusion;
};

struct DenoiserParams {
  DenoiserConfig cfg;
  LinearP atom_embed;  // one-hot atom type -> d_x
  LinearP bond_embed;  // one-hot bond class -> d_e
  LinearP cond_proj;   // d_cond -> d_y
  LinearP y_in;        // (d_y + t_embed_dim) -> d_y
  LinearP init1, init2;  // line-node init, two-layer GELU
  std::vector<DenoiserLayerP> layers;
  LinearP out1, out2;  // edge output head

  std::vector<std::unique_ptr<Parameter>> store;  // creation order
  std::vector<Parameter*> parameters() const;
  Parameter* find(const std::string& name) const;
};

DenoiserParams init_denoiser(const DenoiserConfig& cfg, std::uint64_t seed);

// Per-layer bond->atom attention weights, head-major M x (2 * heads_cross);
// columns alternate (first endpoint, second endpoint) per head.
struct AttentionCapture {
  std::vector<Tensor> bonds_from_atoms_alpha;
};

struct ForwardOptions {
  std::uint64_t rf_seed = 0;          // random-feature draw for the linear kernel
  bool capture_attention = false;
  Rng* dropout_rng = nullptr;         // required only in stochastic training mode
  const Tensor* projected_cond = nullptr;  // optional precomputed 1 x d_y conditioning
};

struct ForwardResult {
  Value pair_logits;  // M x n_bond_classes
  AttentionCapture capture;
};

// Sinusoidal embedding of t/T, 1 x t_embed_dim.
Tensor timestep_embedding(int t, int t_steps, int dim);

// Plain projection of a raw conditioning vector to 1 x d_y (sampling path;
// the recorded path goes through cond_proj inside forward).
Tensor project_conditioning(const DenoiserParams& params, const Tensor& raw_cond);

// ---- sub-layers (exposed for direct testing) ----

Value init_line_nodes(Value e0_pairs, Value h0, const LineGraphIndex& lg,
                      const DenoiserParams& params);

struct PrimalOut {
  Value h;
  Value e2d;
  Value y_p;
};
PrimalOut primal_layer(Value h, Value e2d, const PrimalLayerP& p,
                       const DenoiserConfig& cfg, Rng* dropout_rng = nullptr);

struct LineOut {
  Value z;
  Value y_l;
};
LineOut line_layer(Value z, const LineLayerP& p, const DenoiserConfig& cfg,
                   AttentionKernel kernel, const std::vector<RandomFeatureMap>* rf = nullptr,
                   Rng* dropout_rng = nullptr);

Value cross_attn_atoms_from_bonds(Value h, Value z, const Tensor& incidence_mask,
                                  const CrossAtomsFromBondsP& p, const DenoiserConfig& cfg);

struct BondsFromAtomsOut {
  Value z;
  Tensor alpha;  // M x (2 * heads_cross), populated when captured
};
BondsFromAtomsOut cross_attn_bonds_from_atoms(Value z, Value h, const LineGraphIndex& lg,
                                              const CrossBondsFromAtomsP& p,
                                              const DenoiserConfig& cfg, bool capture = false);

Value global_fusion(Value y, Value y_p, Value y_l, Value h, Value z, const FusionP& p);

struct FilmOut {
  Value h;
  Value z;
};
FilmOut film(Value h, Value z, Value y, const FilmP& p);

Value decode_edges(Graph& g, Value z_final, const Tensor& noisy_onehot_pairs,
                   const DenoiserParams& params);

// Full K-layer dual-stream forward pass; returns per-pair clean-bond logits.
ForwardResult denoiser_forward(Graph& g, const DenoiserParams& params,
                               const MolecularGraph& noisy, const LineGraphIndex& lg,
                               const Tensor& cond, int t, int t_steps,
                               const ForwardOptions& opts = {});

// Symmetric N x N x C logits with a "no-bond certain" sentinel diagonal.
Tensor expand_pair_logits(const Tensor& pair_logits, const LineGraphIndex& lg,
                          double diag_logit = 50.0);

// One-hot matrices used by the forward pass; exposed for oracle tests.
Tensor atom_onehot(const MolecularGraph& g, int n_atom_types);
Tensor pair_onehot(const MolecularGraph& g, const LineGraphIndex& lg, int n_classes);
Tensor dense_edge_onehot(const MolecularGraph& g, int n_classes);  // N^2 x C
Tensor incidence_mask(const LineGraphIndex& lg);                   // N x M

}  // namespace lgdiff
