//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lgdiff/fingerprint.hpp"

namespace lgdiff {

namespace {

struct Sample {
  const MolecularGraph* mol = nullptr;
  const LineGraphIndex* lg = nullptr;
  Tensor cond;  // 1 x d_cond
  std::vector<int> clean_classes;
};

std::vector<Sample> prepare_samples(const std::vector<MolecularGraph>& corpus, const RunConfig& cfg,
                                    std::map<int, LineGraphIndex>& lg_cache) {
  std::vector<Sample> samples;
  samples.reserve(corpus.size());
  for (const MolecularGraph& mol : corpus) {
    if (mol.n_atoms() < 2)
      throw InvalidInputError("train: corpus molecules need at least 2 atoms");
    auto [it, inserted] = lg_cache.try_emplace(mol.n_atoms());
    if (inserted) it->second = build_line_graph(mol.n_atoms());
    Sample s;
    s.mol = &mol;
    s.lg = &it->second;
    const Fingerprint fp = circular_fingerprint(mol, cfg.fingerprint.radius, cfg.fingerprint.n_bits);
    s.cond = Tensor({1, cfg.fingerprint.n_bits}, fingerprint_to_dense(fp));
    s.clean_classes = pair_classes(mol, *s.lg);
    samples.push_back(std::move(s));
  }
  return samples;
}

double sample_loss(const DenoiserParams& params, const TransitionModel& model, const Sample& s,
                   int t_steps, Rng& rng, std::uint64_t rf_seed, Graph* backprop_graph,
                   double loss_scale) {
  const int t = 1 + rng.uniform_int(t_steps);
  const MolecularGraph noisy = forward_corrupt(*s.mol, t, model, rng);
  Graph local;
  Graph& g = backprop_graph ? *backprop_graph : local;
  ForwardOptions opts;
  opts.rf_seed = rf_seed;
  const ForwardResult fr = denoiser_forward(g, params, noisy, *s.lg, s.cond, t, t_steps, opts);
  const Value loss = training_loss(fr.pair_logits, s.clean_classes);
  const double value = loss.val()[0];
  if (backprop_graph) g.backward(scale(loss, loss_scale));
  return value;
}

}  // namespace

double evaluate_loss(const DenoiserParams& params, const TransitionModel& model,
                     const std::vector<MolecularGraph>& corpus, const RunConfig& cfg,
                     std::uint64_t rng_stream) {
  std::map<int, LineGraphIndex> lg_cache;
  const std::vector<Sample> samples = prepare_samples(corpus, cfg, lg_cache);
  Rng rng = Rng(cfg.seed).fork(rng_stream);
  double total = 0.0;
  for (const Sample& s : samples)
    total += sample_loss(params, model, s, cfg.diffusion.t_steps, rng, 0, nullptr, 1.0);
  return total / static_cast<double>(samples.size());
}

TrainResult train_model(DenoiserParams& params, const TransitionModel& model,
                        const std::vector<MolecularGraph>& corpus, const RunConfig& cfg,
                        AdamW& optimizer, const EpochCallback& on_epoch) {
  cfg.validate();
  if (corpus.empty()) throw InvalidInputError("train: empty corpus");
  std::map<int, LineGraphIndex> lg_cache;
  const std::vector<Sample> samples = prepare_samples(corpus, cfg, lg_cache);
  const std::vector<Parameter*> parameters = params.parameters();

  TrainResult result;
  result.initial_loss = evaluate_loss(params, model, corpus, cfg, 0x11);

  Rng shuffle_rng = Rng(cfg.seed).fork(0x22);
  Rng step_rng = Rng(cfg.seed).fork(0x33);
  std::vector<int> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  std::uint64_t global_step = 0;
  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(shuffle_rng.uniform_int(i + 1))]);

    double epoch_loss = 0.0;
    std::size_t cursor = 0;
    while (cursor < order.size()) {
      const std::size_t batch_end = std::min(cursor + static_cast<std::size_t>(cfg.train.batch_size),
                                             order.size());
      const double inv_batch = 1.0 / static_cast<double>(batch_end - cursor);
      for (Parameter* p : parameters) p->zero_grad();
      for (; cursor < batch_end; ++cursor) {
        Graph g;
        const double loss = sample_loss(params, model, samples[static_cast<std::size_t>(order[cursor])],
                                        cfg.diffusion.t_steps, step_rng, global_step, &g, inv_batch);
        if (!std::isfinite(loss))
          throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch));
        epoch_loss += loss;
      }
      if (cfg.train.grad_clip > 0.0) clip_grad_norm(parameters, cfg.train.grad_clip);
      optimizer.step(parameters);
      ++global_step;
    }
    const double mean_loss = epoch_loss / static_cast<double>(samples.size());
    result.epoch_losses.push_back(mean_loss);
    if (on_epoch) on_epoch(epoch, mean_loss);
  }
  return result;
}

Checkpoint make_checkpoint(const DenoiserParams& params, const TransitionModel& model,
                           const RunConfig& cfg, const AdamW* optimizer) {
  Checkpoint ck;
  ck.config_hash = cfg.config_hash();
  ck.config_json = cfg.to_json();
  for (const auto& p : params.store) ck.add("param/" + p->name, p->value);

  const NoiseSchedule& sched = model.schedule();
  ck.add("diffusion/t_steps", Tensor::scalar(static_cast<double>(sched.t_steps)));
  ck.add("diffusion/alpha", Tensor({1, static_cast<int>(sched.alpha.size())}, sched.alpha));
  ck.add("diffusion/alpha_bar", Tensor({1, static_cast<int>(sched.alpha_bar.size())}, sched.alpha_bar));
  ck.add("diffusion/marginals", Tensor({1, model.n_classes()}, model.marginals()));

  if (optimizer) {
    ck.add("adam/step", Tensor::scalar(static_cast<double>(optimizer->step_count())));
    for (const auto& p : params.store) {
      auto it = const_cast<AdamW*>(optimizer)->state().find(p->name);
      if (it == const_cast<AdamW*>(optimizer)->state().end()) continue;
      ck.add("adam_m/" + p->name, it->second.m);
      ck.add("adam_v/" + p->name, it->second.v);
    }
  }
  return ck;
}

void load_params(const Checkpoint& ck, DenoiserParams& params) {
  for (const auto& p : params.store) {
    const Tensor* t = ck.find("param/" + p->name);
    if (t == nullptr)
      throw InvalidInputError("checkpoint: missing parameter '" + p->name + "'");
    if (!t->same_shape(p->value))
      throw InvalidInputError("checkpoint: shape mismatch for parameter '" + p->name + "'");
    p->value = *t;
    p->zero_grad();
  }
}

TransitionModel load_transition_model(const Checkpoint& ck) {
  const Tensor* t_steps = ck.find("diffusion/t_steps");
  const Tensor* alpha = ck.find("diffusion/alpha");
  const Tensor* alpha_bar = ck.find("diffusion/alpha_bar");
  const Tensor* marginals = ck.find("diffusion/marginals");
  if (!t_steps || !alpha || !alpha_bar || !marginals)
    throw InvalidInputError("checkpoint: missing diffusion state");
  NoiseSchedule sched;
  sched.t_steps = static_cast<int>((*t_steps)[0]);
  sched.alpha.assign(alpha->data(), alpha->data() + alpha->numel());
  sched.alpha_bar.assign(alpha_bar->data(), alpha_bar->data() + alpha_bar->numel());
  std::vector<double> m(marginals->data(), marginals->data() + marginals->numel());
  return TransitionModel(std::move(sched), std::move(m));
}

void load_optimizer(const Checkpoint& ck, const DenoiserParams& params, AdamW& optimizer) {
  const Tensor* step = ck.find("adam/step");
  if (step == nullptr) throw InvalidInputError("checkpoint: no optimizer state");
  optimizer.set_step_count(static_cast<long>((*step)[0]));
  for (const auto& p : params.store) {
    const Tensor* m = ck.find("adam_m/" + p->name);
    const Tensor* v = ck.find("adam_v/" + p->name);
    if (!m || !v) continue;
    optimizer.state()[p->name] = {*m, *v};
  }
}

}  // namespace lgdiff
