//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/denoiser.hpp"

#include <cmath>
#include <string>

namespace lgdiff {

void DenoiserConfig::validate() const {
  if (n_layers < 1) throw InvalidInputError("denoiser config: need at least one layer");
  if (d_x % heads_primal != 0) throw InvalidInputError("denoiser config: d_x must divide by primal heads");
  if (d_x % heads_cross != 0) throw InvalidInputError("denoiser config: d_x must divide by cross heads");
  if (d_e % heads_line != 0) throw InvalidInputError("denoiser config: d_e must divide by line heads");
  if (d_e % heads_cross != 0) throw InvalidInputError("denoiser config: d_e must divide by cross heads");
  if (t_embed_dim % 2 != 0) throw InvalidInputError("denoiser config: t_embed_dim must be even");
  if (n_bond_classes < 2 || n_atom_types < 1 || d_cond < 1)
    throw InvalidInputError("denoiser config: invalid class or conditioning dims");
  if (n_random_features < 1) throw InvalidInputError("denoiser config: n_random_features must be positive");
}

DenoiserConfig DenoiserConfig::desk() { return DenoiserConfig{}; }

DenoiserConfig DenoiserConfig::reference() {
  DenoiserConfig c;
  c.n_layers = 5;
  c.d_x = 256;
  c.d_e = 64;
  c.d_y = 1024;
  c.heads_primal = 8;
  c.heads_line = 8;
  c.heads_cross = 8;
  c.ffn_x = 256;
  c.ffn_e = 128;
  c.dropout = 0.1;
  c.attn_dropout = 0.1;
  c.drop_path = 0.1;
  return c;
}

namespace {

struct ParamBuilder {
  DenoiserParams* out;
  Rng rng;

  Parameter* tensor(const std::string& name, std::vector<int> shape, double std_dev) {
    Tensor t(shape);
    if (std_dev > 0.0)
      for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.normal() * std_dev;
    out->store.push_back(std::make_unique<Parameter>(name, std::move(t)));
    return out->store.back().get();
  }

  LinearP linear(const std::string& name, int in, int out_dim, bool bias = true) {
    LinearP lin;
    lin.w = tensor(name + ".w", {in, out_dim}, 1.0 / std::sqrt(static_cast<double>(in)));
    if (bias) lin.b = tensor(name + ".b", {1, out_dim}, 0.0);
    return lin;
  }

  NormP norm(const std::string& name, int dim) {
    NormP n;
    n.gamma = tensor(name + ".gamma", {1, dim}, 0.0);
    n.gamma->value.fill(1.0);
    n.beta = tensor(name + ".beta", {1, dim}, 0.0);
    return n;
  }
};

Value linear_apply(Value x, const LinearP& p) {
  Graph& g = *x.graph;
  Value y = matmul(x, g.param(*p.w));
  if (p.b) y = add_rowvec(y, g.param(*p.b));
  return y;
}

Value affine_norm(Value x, const NormP& p) {
  Graph& g = *x.graph;
  return add_rowvec(mul_rowvec(layer_norm(x), g.param(*p.gamma)), g.param(*p.beta));
}

// Attention-weighted mean pooling followed by a projection to d_y.
Value gated_pool(Value x, const LinearP& score, const LinearP& proj) {
  Value s = linear_apply(x, score);                       // n x 1
  Value alpha = softmax_rows(transpose(s));               // 1 x n
  return linear_apply(matmul(alpha, x), proj);            // 1 x d_y
}

double drop_path_scale(double p, Rng* rng) {
  if (p <= 0.0 || deterministic_eval()) return 1.0;
  if (rng == nullptr) throw InvalidInputError("drop_path: rng required in stochastic mode");
  const double keep = 1.0 - p;
  return rng->uniform() < keep ? 1.0 / keep : 0.0;
}

}  // namespace

std::vector<Parameter*> DenoiserParams::parameters() const {
  std::vector<Parameter*> out;
  out.reserve(store.size());
  for (const auto& p : store) out.push_back(p.get());
  return out;
}

Parameter* DenoiserParams::find(const std::string& name) const {
  for (const auto& p : store)
    if (p->name == name) return p.get();
  return nullptr;
}

DenoiserParams init_denoiser(const DenoiserConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  DenoiserParams params;
  params.cfg = cfg;
  ParamBuilder b{&params, Rng(seed)};

  params.atom_embed = b.linear("embed/atom", cfg.n_atom_types, cfg.d_x);
  params.bond_embed = b.linear("embed/bond", cfg.n_bond_classes, cfg.d_e);
  params.cond_proj = b.linear("embed/cond", cfg.d_cond, cfg.d_y);
  params.y_in = b.linear("embed/y_in", cfg.d_y + cfg.t_embed_dim, cfg.d_y);
  params.init1 = b.linear("line_init/fc1", cfg.d_e + 2 * cfg.d_x, cfg.d_e);
  params.init2 = b.linear("line_init/fc2", cfg.d_e, cfg.d_e);

  params.layers.resize(static_cast<std::size_t>(cfg.n_layers));
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + "/";
    DenoiserLayerP& lp = params.layers[static_cast<std::size_t>(l)];

    lp.film.gamma_p = b.linear(pre + "film/gamma_p", cfg.d_y, cfg.d_x);
    lp.film.beta_p = b.linear(pre + "film/beta_p", cfg.d_y, cfg.d_x);
    lp.film.gamma_l = b.linear(pre + "film/gamma_l", cfg.d_y, cfg.d_e);
    lp.film.beta_l = b.linear(pre + "film/beta_l", cfg.d_y, cfg.d_e);

    lp.primal.ln_attn = b.norm(pre + "primal/ln_attn", cfg.d_x);
    lp.primal.q = b.linear(pre + "primal/q", cfg.d_x, cfg.d_x);
    lp.primal.k = b.linear(pre + "primal/k", cfg.d_x, cfg.d_x);
    lp.primal.v = b.linear(pre + "primal/v", cfg.d_x, cfg.d_x);
    lp.primal.o = b.linear(pre + "primal/o", cfg.d_x, cfg.d_x);
    lp.primal.edge_score = b.linear(pre + "primal/edge_score", cfg.d_e, cfg.heads_primal);
    lp.primal.edge_update = b.linear(pre + "primal/edge_update", cfg.heads_primal, cfg.d_e);
    lp.primal.ln_ffn = b.norm(pre + "primal/ln_ffn", cfg.d_x);
    lp.primal.ffn1 = b.linear(pre + "primal/ffn1", cfg.d_x, cfg.ffn_x);
    lp.primal.ffn2 = b.linear(pre + "primal/ffn2", cfg.ffn_x, cfg.d_x);
    lp.primal.pool_score = b.linear(pre + "primal/pool_score", cfg.d_x, 1);
    lp.primal.pool_proj = b.linear(pre + "primal/pool_proj", cfg.d_x, cfg.d_y);

    lp.line.ln_attn = b.norm(pre + "line/ln_attn", cfg.d_e);
    lp.line.q = b.linear(pre + "line/q", cfg.d_e, cfg.d_e);
    lp.line.k = b.linear(pre + "line/k", cfg.d_e, cfg.d_e);
    lp.line.v = b.linear(pre + "line/v", cfg.d_e, cfg.d_e);
    lp.line.o = b.linear(pre + "line/o", cfg.d_e, cfg.d_e);
    lp.line.ln_ffn = b.norm(pre + "line/ln_ffn", cfg.d_e);
    lp.line.ffn1 = b.linear(pre + "line/ffn1", cfg.d_e, cfg.ffn_e);
    lp.line.ffn2 = b.linear(pre + "line/ffn2", cfg.ffn_e, cfg.d_e);
    lp.line.pool_score = b.linear(pre + "line/pool_score", cfg.d_e, 1);
    lp.line.pool_proj = b.linear(pre + "line/pool_proj", cfg.d_e, cfg.d_y);

    lp.atoms_from_bonds.q = b.linear(pre + "cross_pl/q", cfg.d_x, cfg.d_x, false);
    lp.atoms_from_bonds.k = b.linear(pre + "cross_pl/k", cfg.d_e, cfg.d_x, false);
    lp.atoms_from_bonds.v = b.linear(pre + "cross_pl/v", cfg.d_e, cfg.d_x, false);
    lp.atoms_from_bonds.o = b.linear(pre + "cross_pl/o", cfg.d_x, cfg.d_x, false);

    lp.bonds_from_atoms.q = b.linear(pre + "cross_lp/q", cfg.d_e, cfg.d_e, false);
    lp.bonds_from_atoms.k = b.linear(pre + "cross_lp/k", cfg.d_x, cfg.d_e, false);
    lp.bonds_from_atoms.v = b.linear(pre + "cross_lp/v", cfg.d_x, cfg.d_e, false);
    lp.bonds_from_atoms.o = b.linear(pre + "cross_lp/o", cfg.d_e, cfg.d_e, false);

    lp.fusion.proj = b.linear(pre + "fusion/proj", 2 * cfg.d_y + cfg.d_x + cfg.d_e, cfg.d_y);
    lp.fusion.ln = b.norm(pre + "fusion/ln", cfg.d_y);
  }

  params.out1 = b.linear("edge_out/fc1", cfg.d_e, cfg.d_e);
  params.out2 = b.linear("edge_out/fc2", cfg.d_e, cfg.n_bond_classes);
  return params;
}

Tensor timestep_embedding(int t, int t_steps, int dim) {
  if (t_steps < 1 || dim < 2 || dim % 2 != 0)
    throw InvalidInputError("timestep_embedding: invalid arguments");
  Tensor emb({1, dim});
  const double pos = 1000.0 * static_cast<double>(t) / static_cast<double>(t_steps);
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    const double freq = std::pow(10000.0, -static_cast<double>(k) / half);
    emb[2 * k] = std::sin(pos * freq);
    emb[2 * k + 1] = std::cos(pos * freq);
  }
  return emb;
}

Tensor project_conditioning(const DenoiserParams& params, const Tensor& raw_cond) {
  if (raw_cond.ndim() != 2 || raw_cond.rows() != 1 || raw_cond.cols() != params.cfg.d_cond)
    throw ShapeError("project_conditioning: expected 1 x d_cond input");
  Tensor y = matmul(raw_cond, params.cond_proj.w->value);
  add_inplace(y, params.cond_proj.b->value);
  return y;
}

Tensor atom_onehot(const MolecularGraph& g, int n_atom_types) {
  Tensor oh({g.n_atoms(), n_atom_types});
  for (int i = 0; i < g.n_atoms(); ++i) {
    const int t = g.atom_type(i);
    if (t < 0 || t >= n_atom_types)
      throw InvalidInputError("atom_onehot: atom type out of range");
    oh(i, t) = 1.0;
  }
  return oh;
}

Tensor pair_onehot(const MolecularGraph& g, const LineGraphIndex& lg, int n_classes) {
  if (lg.n_atoms() != g.n_atoms()) throw InvalidInputError("pair_onehot: size mismatch");
  Tensor oh({lg.m_nodes(), n_classes});
  for (int u = 0; u < lg.m_nodes(); ++u) {
    const auto [i, j] = lg.pair(u);
    const int c = g.bond(i, j);
    if (c < 0 || c >= n_classes) throw InvalidInputError("pair_onehot: bond class out of range");
    oh(u, c) = 1.0;
  }
  return oh;
}

Tensor dense_edge_onehot(const MolecularGraph& g, int n_classes) {
  const int n = g.n_atoms();
  Tensor oh({n * n, n_classes});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int c = i == j ? 0 : g.bond(i, j);
      oh(i * n + j, c) = 1.0;
    }
  return oh;
}

Tensor incidence_mask(const LineGraphIndex& lg) {
  Tensor mask({lg.n_atoms(), lg.m_nodes()});
  for (int i = 0; i < lg.n_atoms(); ++i)
    for (int u = 0; u < lg.m_nodes(); ++u) mask(i, u) = lg.incident(i, u) ? 1.0 : 0.0;
  return mask;
}

Value init_line_nodes(Value e0_pairs, Value h0, const LineGraphIndex& lg,
                      const DenoiserParams& params) {
  if (e0_pairs.rows() != lg.m_nodes() || h0.rows() != lg.n_atoms())
    throw ShapeError("init_line_nodes: inputs do not match the line graph");
  std::vector<int> first, second;
  first.reserve(static_cast<std::size_t>(lg.m_nodes()));
  second.reserve(static_cast<std::size_t>(lg.m_nodes()));
  for (const auto& [i, j] : lg.pairs()) {
    first.push_back(i);
    second.push_back(j);
  }
  // Averaged over both endpoint orders: pair states must not depend on which
  // endpoint carries the smaller index, or relabeling atoms would change them.
  auto fuse = [&](const std::vector<int>& a, const std::vector<int>& b) {
    Value cat = concat_cols({e0_pairs, gather_rows(h0, a), gather_rows(h0, b)});
    return linear_apply(gelu(linear_apply(cat, params.init1)), params.init2);
  };
  return scale(add(fuse(first, second), fuse(second, first)), 0.5);
}

PrimalOut primal_layer(Value h, Value e2d, const PrimalLayerP& p,
                       const DenoiserConfig& cfg, Rng* dropout_rng) {
  const int n = h.rows();
  const int heads = cfg.heads_primal;
  const int hd = cfg.d_x / heads;
  if (e2d.rows() != n * n || e2d.cols() != cfg.d_e)
    throw ShapeError("primal_layer: edge state must be N^2 x d_e");

  Value hn = affine_norm(h, p.ln_attn);
  Value q = linear_apply(hn, p.q);
  Value k = linear_apply(hn, p.k);
  Value v = linear_apply(hn, p.v);
  Value edge_bias = linear_apply(e2d, p.edge_score);  // N^2 x heads

  std::vector<Value> head_outs;
  std::vector<Value> head_scores;
  head_outs.reserve(static_cast<std::size_t>(heads));
  head_scores.reserve(static_cast<std::size_t>(heads));
  for (int head = 0; head < heads; ++head) {
    Value qh = slice_cols(q, head * hd, hd);
    Value kh = slice_cols(k, head * hd, hd);
    Value vh = slice_cols(v, head * hd, hd);
    Value scores = scale(matmul(qh, transpose(kh)), 1.0 / std::sqrt(static_cast<double>(hd)));
    scores = add(scores, reshape(slice_cols(edge_bias, head, 1), {n, n}));
    head_scores.push_back(reshape(scores, {n * n, 1}));
    Value attn = dropout(softmax_rows(scores), cfg.attn_dropout, dropout_rng);
    head_outs.push_back(matmul(attn, vh));
  }
  Value attn_out = dropout(linear_apply(concat_cols(head_outs), p.o), cfg.dropout, dropout_rng);
  Value h1 = add(h, scale(attn_out, drop_path_scale(cfg.drop_path, dropout_rng)));

  // Edge states pick up a residual projection of the per-head scores.
  Value e_next = add(e2d, linear_apply(concat_cols(head_scores), p.edge_update));

  Value ffn = linear_apply(dropout(gelu(linear_apply(affine_norm(h1, p.ln_ffn), p.ffn1)),
                                   cfg.dropout, dropout_rng),
                           p.ffn2);
  Value h2 = add(h1, scale(ffn, drop_path_scale(cfg.drop_path, dropout_rng)));

  return {h2, e_next, gated_pool(h2, p.pool_score, p.pool_proj)};
}

namespace {

// FAVOR+ positive-feature attention for one head, recorded on the graph.
Value linear_attention_head(Value qh, Value kh, Value vh, const RandomFeatureMap& rf) {
  const int hd = qh.cols();
  const double pre = std::pow(static_cast<double>(hd), -0.25);
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(rf.n_features));
  Value proj_t = qh.graph->constant(transpose(rf.features));  // hd x R

  auto phi = [&](Value x) {
    Value xs = scale(x, pre);
    Value sq = scale(sum_over_axis(mul(xs, xs), 1), -0.5);           // m x 1
    return scale(exp(add_colvec(matmul(xs, proj_t), sq)), inv_sqrt_r);
  };

  Value phi_q = phi(qh);
  Value phi_k = phi(kh);
  Value num = matmul(phi_q, matmul(transpose(phi_k), vh));            // m x hd
  Value den = matmul(phi_q, transpose(sum_over_axis(phi_k, 0)));      // m x 1
  const Tensor& dv = den.val();
  for (std::int64_t i = 0; i < dv.numel(); ++i)
    if (dv[i] < 1e-30)
      throw NumericalError("line attention: FAVOR+ normalizer underflow");
  return mul_colvec(num, reciprocal(den));
}

}  // namespace

LineOut line_layer(Value z, const LineLayerP& p, const DenoiserConfig& cfg,
                   AttentionKernel kernel, const std::vector<RandomFeatureMap>* rf,
                   Rng* dropout_rng) {
  const int heads = cfg.heads_line;
  const int hd = cfg.d_e / heads;

  std::vector<RandomFeatureMap> local_rf;
  if (kernel == AttentionKernel::linear && rf == nullptr) {
    for (int head = 0; head < heads; ++head)
      local_rf.push_back(make_random_features(cfg.n_random_features, hd,
                                              0x9e377ULL + static_cast<std::uint64_t>(head)));
    rf = &local_rf;
  }
  if (kernel == AttentionKernel::linear && static_cast<int>(rf->size()) != heads)
    throw InvalidInputError("line_layer: one feature map per head required");

  Value zn = affine_norm(z, p.ln_attn);
  Value q = linear_apply(zn, p.q);
  Value k = linear_apply(zn, p.k);
  Value v = linear_apply(zn, p.v);

  std::vector<Value> head_outs;
  head_outs.reserve(static_cast<std::size_t>(heads));
  for (int head = 0; head < heads; ++head) {
    Value qh = slice_cols(q, head * hd, hd);
    Value kh = slice_cols(k, head * hd, hd);
    Value vh = slice_cols(v, head * hd, hd);
    if (kernel == AttentionKernel::exact) {
      Value scores = scale(matmul(qh, transpose(kh)), 1.0 / std::sqrt(static_cast<double>(hd)));
      Value attn = dropout(softmax_rows(scores), cfg.attn_dropout, dropout_rng);
      head_outs.push_back(matmul(attn, vh));
    } else {
      head_outs.push_back(linear_attention_head(qh, kh, vh, (*rf)[static_cast<std::size_t>(head)]));
    }
  }
  Value attn_out = dropout(linear_apply(concat_cols(head_outs), p.o), cfg.dropout, dropout_rng);
  Value z1 = add(z, scale(attn_out, drop_path_scale(cfg.drop_path, dropout_rng)));

  Value ffn = linear_apply(dropout(gelu(linear_apply(affine_norm(z1, p.ln_ffn), p.ffn1)),
                                   cfg.dropout, dropout_rng),
                           p.ffn2);
  Value z2 = add(z1, scale(ffn, drop_path_scale(cfg.drop_path, dropout_rng)));

  return {z2, gated_pool(z2, p.pool_score, p.pool_proj)};
}

Value cross_attn_atoms_from_bonds(Value h, Value z, const Tensor& incidence_mask,
                                  const CrossAtomsFromBondsP& p, const DenoiserConfig& cfg) {
  const int n = h.rows();
  const int m = z.rows();
  if (incidence_mask.ndim() != 2 || incidence_mask.rows() != n || incidence_mask.cols() != m)
    throw ShapeError("cross_attn_atoms_from_bonds: incidence mask must be N x M");
  const int heads = cfg.heads_cross;
  const int hd = cfg.d_x / heads;

  Value q = linear_apply(h, p.q);
  Value k = linear_apply(z, p.k);
  Value v = linear_apply(z, p.v);

  std::vector<Value> head_outs;
  head_outs.reserve(static_cast<std::size_t>(heads));
  for (int head = 0; head < heads; ++head) {
    Value qh = slice_cols(q, head * hd, hd);
    Value kh = slice_cols(k, head * hd, hd);
    Value vh = slice_cols(v, head * hd, hd);
    Value scores = scale(matmul(qh, transpose(kh)), 1.0 / std::sqrt(static_cast<double>(hd)));
    Value attn = masked_softmax_rows(scores, incidence_mask);
    head_outs.push_back(matmul(attn, vh));
  }
  return add(h, linear_apply(concat_cols(head_outs), p.o));
}

BondsFromAtomsOut cross_attn_bonds_from_atoms(Value z, Value h, const LineGraphIndex& lg,
                                              const CrossBondsFromAtomsP& p,
                                              const DenoiserConfig& cfg, bool capture) {
  const int m = lg.m_nodes();
  if (z.rows() != m || h.rows() != lg.n_atoms())
    throw ShapeError("cross_attn_bonds_from_atoms: inputs do not match the line graph");
  const int heads = cfg.heads_cross;
  const int hd = cfg.d_e / heads;

  std::vector<int> first, second;
  first.reserve(static_cast<std::size_t>(m));
  second.reserve(static_cast<std::size_t>(m));
  for (const auto& [i, j] : lg.pairs()) {
    first.push_back(i);
    second.push_back(j);
  }

  Value q = linear_apply(z, p.q);
  Value k_all = linear_apply(h, p.k);
  Value v_all = linear_apply(h, p.v);
  Value k1 = gather_rows(k_all, first);
  Value k2 = gather_rows(k_all, second);
  Value v1 = gather_rows(v_all, first);
  Value v2 = gather_rows(v_all, second);

  Tensor alpha_capture;
  if (capture) alpha_capture = Tensor({m, 2 * heads});

  std::vector<Value> head_outs;
  head_outs.reserve(static_cast<std::size_t>(heads));
  for (int head = 0; head < heads; ++head) {
    Value qh = slice_cols(q, head * hd, hd);
    Value k1h = slice_cols(k1, head * hd, hd);
    Value k2h = slice_cols(k2, head * hd, hd);
    Value v1h = slice_cols(v1, head * hd, hd);
    Value v2h = slice_cols(v2, head * hd, hd);
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
    Value s1 = scale(sum_over_axis(mul(qh, k1h), 1), inv_sqrt);
    Value s2 = scale(sum_over_axis(mul(qh, k2h), 1), inv_sqrt);
    Value attn = softmax_rows(concat_cols({s1, s2}));  // m x 2, endpoints in pair order
    if (capture) {
      const Tensor& av = attn.val();
      for (int u = 0; u < m; ++u) {
        alpha_capture(u, 2 * head) = av(u, 0);
        alpha_capture(u, 2 * head + 1) = av(u, 1);
      }
    }
    Value out = add(mul_colvec(v1h, slice_cols(attn, 0, 1)), mul_colvec(v2h, slice_cols(attn, 1, 1)));
    head_outs.push_back(out);
  }
  Value z_next = add(z, linear_apply(concat_cols(head_outs), p.o));
  return {z_next, std::move(alpha_capture)};
}

Value global_fusion(Value y, Value y_p, Value y_l, Value h, Value z, const FusionP& p) {
  Value cat = concat_cols({y_p, y_l, mean_over_axis(h, 0), mean_over_axis(z, 0)});
  return affine_norm(add(y, linear_apply(cat, p.proj)), p.ln);
}

FilmOut film(Value h, Value z, Value y, const FilmP& p) {
  Value gamma_p = add_scalar(linear_apply(y, p.gamma_p), 1.0);
  Value beta_p = linear_apply(y, p.beta_p);
  Value gamma_l = add_scalar(linear_apply(y, p.gamma_l), 1.0);
  Value beta_l = linear_apply(y, p.beta_l);
  return {add_rowvec(mul_rowvec(h, gamma_p), beta_p), add_rowvec(mul_rowvec(z, gamma_l), beta_l)};
}

Value decode_edges(Graph& g, Value z_final, const Tensor& noisy_onehot_pairs,
                   const DenoiserParams& params) {
  if (noisy_onehot_pairs.ndim() != 2 || noisy_onehot_pairs.rows() != z_final.rows() ||
      noisy_onehot_pairs.cols() != params.cfg.n_bond_classes)
    throw ShapeError("decode_edges: noisy one-hot must be M x n_bond_classes");
  Value f_out = linear_apply(gelu(linear_apply(z_final, params.out1)), params.out2);
  return add(f_out, g.constant(noisy_onehot_pairs));
}

ForwardResult denoiser_forward(Graph& g, const DenoiserParams& params,
                               const MolecularGraph& noisy, const LineGraphIndex& lg,
                               const Tensor& cond, int t, int t_steps,
                               const ForwardOptions& opts) {
  const DenoiserConfig& cfg = params.cfg;
  if (lg.n_atoms() != noisy.n_atoms())
    throw InvalidInputError("denoiser_forward: line graph size mismatch");
  if (t < 1 || t > t_steps) throw InvalidInputError("denoiser_forward: t out of range");

  // Embeddings.
  Value h = linear_apply(g.constant(atom_onehot(noisy, cfg.n_atom_types)), params.atom_embed);
  Tensor pair_oh = pair_onehot(noisy, lg, cfg.n_bond_classes);
  Value e_pairs0 = linear_apply(g.constant(pair_oh), params.bond_embed);
  Value e2d = linear_apply(g.constant(dense_edge_onehot(noisy, cfg.n_bond_classes)), params.bond_embed);
  Value z = init_line_nodes(e_pairs0, h, lg, params);

  Value y_cond;
  if (opts.projected_cond != nullptr) {
    if (opts.projected_cond->ndim() != 2 || opts.projected_cond->rows() != 1 ||
        opts.projected_cond->cols() != cfg.d_y)
      throw ShapeError("denoiser_forward: projected conditioning must be 1 x d_y");
    y_cond = g.constant(*opts.projected_cond);
  } else {
    if (cond.ndim() != 2 || cond.rows() != 1 || cond.cols() != cfg.d_cond)
      throw ShapeError("denoiser_forward: conditioning must be 1 x d_cond");
    y_cond = linear_apply(g.constant(cond), params.cond_proj);
  }
  Value y = linear_apply(
      concat_cols({y_cond, g.constant(timestep_embedding(t, t_steps, cfg.t_embed_dim))}),
      params.y_in);

  // Per-pass random features for the linear kernel, one map per head.
  std::vector<RandomFeatureMap> rf;
  if (cfg.kernel == AttentionKernel::linear) {
    const int hd = cfg.d_e / cfg.heads_line;
    for (int head = 0; head < cfg.heads_line; ++head)
      rf.push_back(make_random_features(cfg.n_random_features, hd,
                                        splitmix64(opts.rf_seed) + static_cast<std::uint64_t>(head)));
  }

  const Tensor inc_mask = incidence_mask(lg);
  ForwardResult result;
  for (int l = 0; l < cfg.n_layers; ++l) {
    const DenoiserLayerP& lp = params.layers[static_cast<std::size_t>(l)];
    auto [h_mod, z_mod] = film(h, z, y, lp.film);
    PrimalOut pout = primal_layer(h_mod, e2d, lp.primal, cfg, opts.dropout_rng);
    LineOut lout = line_layer(z_mod, lp.line, cfg, cfg.kernel,
                              rf.empty() ? nullptr : &rf, opts.dropout_rng);
    h = cross_attn_atoms_from_bonds(pout.h, lout.z, inc_mask, lp.atoms_from_bonds, cfg);
    BondsFromAtomsOut bout = cross_attn_bonds_from_atoms(lout.z, h, lg, lp.bonds_from_atoms,
                                                         cfg, opts.capture_attention);
    z = bout.z;
    e2d = pout.e2d;
    if (opts.capture_attention) result.capture.bonds_from_atoms_alpha.push_back(std::move(bout.alpha));
    y = global_fusion(y, pout.y_p, lout.y_l, h, z, lp.fusion);
  }

  result.pair_logits = decode_edges(g, z, pair_oh, params);
  return result;
}

Tensor expand_pair_logits(const Tensor& pair_logits, const LineGraphIndex& lg, double diag_logit) {
  if (pair_logits.ndim() != 2 || pair_logits.rows() != lg.m_nodes())
    throw ShapeError("expand_pair_logits: logits must be M x C");
  const int n = lg.n_atoms();
  const int c = pair_logits.cols();
  Tensor dense({n, n, c});
  for (int i = 0; i < n; ++i) dense(i, i, 0) = diag_logit;
  for (int u = 0; u < lg.m_nodes(); ++u) {
    const auto [i, j] = lg.pair(u);
    for (int k = 0; k < c; ++k) {
      dense(i, j, k) = pair_logits(u, k);
      dense(j, i, k) = pair_logits(u, k);
    }
  }
  return dense;
}

}  // namespace lgdiff
