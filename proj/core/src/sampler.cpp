//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace lgdiff {

JumpSchedule make_jump_schedule(int t_steps, int evaluations, JumpSpacing spacing) {
  if (t_steps < 1) throw InvalidInputError("jump schedule: T must be >= 1");
  if (evaluations < 1 || evaluations > t_steps)
    throw InvalidInputError("jump schedule: need 1 <= J <= T");
  JumpSchedule s;
  s.taus.resize(static_cast<std::size_t>(evaluations) + 1);
  for (int j = 0; j <= evaluations; ++j) {
    const double frac = static_cast<double>(j) / evaluations;
    double tau;
    if (spacing == JumpSpacing::uniform) {
      tau = static_cast<double>(t_steps) * (1.0 - frac);
    } else {
      // Cosine spacing concentrates evaluations at low noise levels.
      tau = static_cast<double>(t_steps) * (1.0 - std::cos((1.0 - frac) * 1.5707963267948966));
    }
    s.taus[static_cast<std::size_t>(j)] = static_cast<int>(std::llround(tau));
  }
  s.taus.front() = t_steps;
  s.taus.back() = 0;
  // Rounding can collide neighbours; restore strict decrease. J <= T
  // guarantees an integer solution exists.
  for (int j = 1; j <= evaluations; ++j)
    s.taus[static_cast<std::size_t>(j)] =
        std::min(s.taus[static_cast<std::size_t>(j)], s.taus[static_cast<std::size_t>(j - 1)] - 1);
  for (int j = evaluations - 1; j >= 0; --j)
    s.taus[static_cast<std::size_t>(j)] =
        std::max(s.taus[static_cast<std::size_t>(j)], s.taus[static_cast<std::size_t>(j + 1)] + 1);
  if (s.taus.front() != t_steps || s.taus.back() != 0)
    throw InvalidInputError("jump schedule: endpoints out of range after de-duplication");
  return s;
}

MolecularGraph reverse_sample(const std::vector<int>& atom_types, const DenoiseFn& denoise,
                              const TransitionModel& model, const JumpSchedule& schedule,
                              Rng& rng, SampleTrace* trace) {
  const int n = static_cast<int>(atom_types.size());
  if (n < 2) throw InvalidInputError("reverse_sample: need at least 2 atoms");
  if (schedule.taus.empty() || schedule.taus.front() != model.t_steps() || schedule.taus.back() != 0)
    throw InvalidInputError("reverse_sample: schedule does not span T..0");
  const int c = model.n_classes();
  const LineGraphIndex lg = build_line_graph(n);
  const int m = lg.m_nodes();

  // E_T: every unordered pair drawn from the marginals.
  MolecularGraph state(atom_types);
  for (int u = 0; u < m; ++u) {
    const auto [i, j] = lg.pair(u);
    const int cls = rng.categorical(model.marginals().data(), c);
    if (cls != 0) state.set_bond(i, j, cls);
  }

  int calls = 0;
  double final_score = 0.0;
  for (int jstep = 0; jstep + 1 < static_cast<int>(schedule.taus.size()); ++jstep) {
    const int t = schedule.taus[static_cast<std::size_t>(jstep)];
    const int s = schedule.taus[static_cast<std::size_t>(jstep) + 1];
    const Tensor clean_probs = denoise(state, t);
    ++calls;
    if (clean_probs.ndim() != 2 || clean_probs.rows() != m || clean_probs.cols() != c)
      throw ShapeError("reverse_sample: denoiser output must be M x C");

    MolecularGraph next(atom_types);
    if (s == 0) {
      // Final step: per-pair argmax of the clean prediction.
      double score = 0.0;
      for (int u = 0; u < m; ++u) {
        const double* row = clean_probs.data() + static_cast<std::size_t>(u) * c;
        const int cls = argmax(row, c);
        score += std::log(std::max(row[cls], 1e-300));
        if (cls != 0) next.set_bond(lg.pair(u).first, lg.pair(u).second, cls);
      }
      final_score = score / m;
    } else {
      for (int u = 0; u < m; ++u) {
        const auto [i, j] = lg.pair(u);
        const std::vector<double> post = model_posterior(
            std::span<const double>(clean_probs.data() + static_cast<std::size_t>(u) * c,
                                    static_cast<std::size_t>(c)),
            state.bond(i, j), s, t, model);
        const int cls = rng.categorical(post.data(), c);
        if (cls != 0) next.set_bond(i, j, cls);
      }
    }
    state = std::move(next);
  }
  if (trace) {
    trace->denoiser_calls = calls;
    trace->final_score = final_score;
  }
  return state;
}

std::vector<Candidate> generate_candidates(const std::vector<int>& atom_types,
                                           const DenoiseFn& denoise, const TransitionModel& model,
                                           const JumpSchedule& schedule,
                                           const CandidateOptions& opts, const AtomVocab& vocab) {
  if (opts.n_candidates < 1) throw InvalidInputError("generate_candidates: need n_candidates >= 1");
  std::vector<Candidate> out(static_cast<std::size_t>(opts.n_candidates));
  const Rng base(opts.seed);

  auto run_one = [&](int idx) {
    Rng rng = base.fork(static_cast<std::uint64_t>(idx));
    SampleTrace trace;
    const auto start = std::chrono::steady_clock::now();
    MolecularGraph g = reverse_sample(atom_types, denoise, model, schedule, rng, &trace);
    const auto stop = std::chrono::steady_clock::now();
    Candidate& cand = out[static_cast<std::size_t>(idx)];
    cand.graph = std::move(g);
    cand.score = trace.final_score;
    cand.seed = rng.seed();
    cand.j_steps = schedule.evaluations();
    cand.gen_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  };

  const int threads = std::max(1, std::min(opts.n_threads, opts.n_candidates));
  if (threads == 1) {
    for (int i = 0; i < opts.n_candidates; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < opts.n_candidates; i = next.fetch_add(1)) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  if (opts.filter_valence) {
    std::erase_if(out, [&](const Candidate& cand) { return !check_valence(cand.graph, vocab).valid; });
  }

  std::vector<std::string> keys(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) keys[i] = canonical_key(out[i].graph);
  std::vector<int> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ai = static_cast<std::size_t>(a);
    const auto bi = static_cast<std::size_t>(b);
    if (out[ai].score != out[bi].score) return out[ai].score > out[bi].score;
    return keys[ai] < keys[bi];
  });
  std::vector<Candidate> ranked;
  ranked.reserve(out.size());
  for (int idx : order) ranked.push_back(std::move(out[static_cast<std::size_t>(idx)]));
  return ranked;
}

DenoiseFn make_denoise_fn(const DenoiserParams& params, const LineGraphIndex& lg,
                          const Tensor& raw_cond, int t_steps, std::uint64_t rf_seed) {
  Tensor projected = project_conditioning(params, raw_cond);
  return [&params, lg, projected, t_steps, rf_seed](const MolecularGraph& noisy, int t) {
    Graph graph;
    ForwardOptions opts;
    opts.projected_cond = &projected;
    opts.rf_seed = rf_seed;
    ForwardResult fr = denoiser_forward(graph, params, noisy, lg, Tensor(), t, t_steps, opts);
    Tensor probs = fr.pair_logits.val();
    for (int u = 0; u < probs.rows(); ++u)
      softmax_inplace(probs.data() + static_cast<std::size_t>(u) * probs.cols(), probs.cols());
    return probs;
  };
}

}  // namespace lgdiff
