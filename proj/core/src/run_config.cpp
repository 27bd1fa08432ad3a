//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lgdiff {

namespace {

std::string kernel_name(AttentionKernel k) {
  return k == AttentionKernel::exact ? "exact" : "linear";
}

AttentionKernel kernel_from_name(const std::string& s) {
  if (s == "exact") return AttentionKernel::exact;
  if (s == "linear") return AttentionKernel::linear;
  throw InvalidInputError("config: unknown attention kernel '" + s + "'");
}

std::string spacing_name(JumpSpacing s) {
  return s == JumpSpacing::uniform ? "uniform" : "cosine";
}

JumpSpacing spacing_from_name(const std::string& s) {
  if (s == "uniform") return JumpSpacing::uniform;
  if (s == "cosine") return JumpSpacing::cosine;
  throw InvalidInputError("config: unknown jump spacing '" + s + "'");
}

nlohmann::json denoiser_to_json(const DenoiserConfig& d) {
  return {{"n_layers", d.n_layers},
          {"d_x", d.d_x},
          {"d_e", d.d_e},
          {"d_y", d.d_y},
          {"heads_primal", d.heads_primal},
          {"heads_line", d.heads_line},
          {"heads_cross", d.heads_cross},
          {"n_bond_classes", d.n_bond_classes},
          {"n_atom_types", d.n_atom_types},
          {"ffn_x", d.ffn_x},
          {"ffn_e", d.ffn_e},
          {"d_cond", d.d_cond},
          {"t_embed_dim", d.t_embed_dim},
          {"kernel", kernel_name(d.kernel)},
          {"n_random_features", d.n_random_features},
          {"dropout", d.dropout},
          {"attn_dropout", d.attn_dropout},
          {"drop_path", d.drop_path}};
}

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

DenoiserConfig denoiser_from_json(const nlohmann::json& j) {
  DenoiserConfig d;
  read_if(j, "n_layers", d.n_layers);
  read_if(j, "d_x", d.d_x);
  read_if(j, "d_e", d.d_e);
  read_if(j, "d_y", d.d_y);
  read_if(j, "heads_primal", d.heads_primal);
  read_if(j, "heads_line", d.heads_line);
  read_if(j, "heads_cross", d.heads_cross);
  read_if(j, "n_bond_classes", d.n_bond_classes);
  read_if(j, "n_atom_types", d.n_atom_types);
  read_if(j, "ffn_x", d.ffn_x);
  read_if(j, "ffn_e", d.ffn_e);
  read_if(j, "d_cond", d.d_cond);
  read_if(j, "t_embed_dim", d.t_embed_dim);
  if (j.contains("kernel")) d.kernel = kernel_from_name(j.at("kernel").get<std::string>());
  read_if(j, "n_random_features", d.n_random_features);
  read_if(j, "dropout", d.dropout);
  read_if(j, "attn_dropout", d.attn_dropout);
  read_if(j, "drop_path", d.drop_path);
  return d;
}

}  // namespace

void RunConfig::validate() const {
  denoiser.validate();
  if (diffusion.t_steps < 1) throw InvalidInputError("config: diffusion.t_steps must be >= 1");
  if (train.epochs < 0 || train.batch_size < 1) throw InvalidInputError("config: invalid training setup");
  if (sample.n_candidates < 1) throw InvalidInputError("config: sample.n_candidates must be >= 1");
  if (sample.j_steps < 0 || sample.j_steps > diffusion.t_steps)
    throw InvalidInputError("config: sample.j_steps must lie in [0, T]");
  if (fingerprint.n_bits != denoiser.d_cond)
    throw InvalidInputError("config: fingerprint.n_bits must equal denoiser.d_cond");
  if (corpus.min_atoms < 1 || corpus.max_atoms < corpus.min_atoms)
    throw InvalidInputError("config: invalid corpus atom bounds");
}

std::uint64_t RunConfig::config_hash() const {
  nlohmann::json j;
  j["denoiser"] = denoiser_to_json(denoiser);
  j["diffusion"] = {{"t_steps", diffusion.t_steps}, {"cosine_offset", diffusion.cosine_offset}};
  j["fingerprint"] = {{"radius", fingerprint.radius}, {"n_bits", fingerprint.n_bits}};
  const std::string canon = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["denoiser"] = denoiser_to_json(denoiser);
  j["diffusion"] = {{"t_steps", diffusion.t_steps}, {"cosine_offset", diffusion.cosine_offset}};
  j["train"] = {{"lr", train.optim.lr},
                {"beta1", train.optim.beta1},
                {"beta2", train.optim.beta2},
                {"eps", train.optim.eps},
                {"weight_decay", train.optim.weight_decay},
                {"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"grad_clip", train.grad_clip}};
  j["sample"] = {{"n_candidates", sample.n_candidates},
                 {"j_steps", sample.j_steps},
                 {"spacing", spacing_name(sample.spacing)},
                 {"filter_valence", sample.filter_valence},
                 {"n_threads", sample.n_threads}};
  j["fingerprint"] = {{"radius", fingerprint.radius}, {"n_bits", fingerprint.n_bits}};
  j["corpus"] = {{"n_molecules", corpus.n_molecules},
                 {"min_atoms", corpus.min_atoms},
                 {"max_atoms", corpus.max_atoms}};
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  read_if(j, "seed", c.seed);
  if (j.contains("denoiser")) c.denoiser = denoiser_from_json(j.at("denoiser"));
  if (j.contains("diffusion")) {
    read_if(j.at("diffusion"), "t_steps", c.diffusion.t_steps);
    read_if(j.at("diffusion"), "cosine_offset", c.diffusion.cosine_offset);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    read_if(t, "lr", c.train.optim.lr);
    read_if(t, "beta1", c.train.optim.beta1);
    read_if(t, "beta2", c.train.optim.beta2);
    read_if(t, "eps", c.train.optim.eps);
    read_if(t, "weight_decay", c.train.optim.weight_decay);
    read_if(t, "epochs", c.train.epochs);
    read_if(t, "batch_size", c.train.batch_size);
    read_if(t, "grad_clip", c.train.grad_clip);
  }
  if (j.contains("sample")) {
    const auto& s = j.at("sample");
    read_if(s, "n_candidates", c.sample.n_candidates);
    read_if(s, "j_steps", c.sample.j_steps);
    if (s.contains("spacing")) c.sample.spacing = spacing_from_name(s.at("spacing").get<std::string>());
    read_if(s, "filter_valence", c.sample.filter_valence);
    read_if(s, "n_threads", c.sample.n_threads);
  }
  if (j.contains("fingerprint")) {
    read_if(j.at("fingerprint"), "radius", c.fingerprint.radius);
    read_if(j.at("fingerprint"), "n_bits", c.fingerprint.n_bits);
  }
  if (j.contains("corpus")) {
    read_if(j.at("corpus"), "n_molecules", c.corpus.n_molecules);
    read_if(j.at("corpus"), "min_atoms", c.corpus.min_atoms);
    read_if(j.at("corpus"), "max_atoms", c.corpus.max_atoms);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return from_json(buf.str());
}

void RunConfig::save_file(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InvalidInputError("config: cannot open '" + path + "' for writing");
  os << to_json() << '\n';
}

RunConfig RunConfig::desk_default() { return RunConfig{}; }

RunConfig RunConfig::reference() {
  RunConfig c;
  c.denoiser = DenoiserConfig::reference();
  c.diffusion.t_steps = 500;
  c.train.optim.lr = 1.5e-3;
  c.train.batch_size = 16;
  c.train.epochs = 75;
  return c;
}

}  // namespace lgdiff
