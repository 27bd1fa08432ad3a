//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace lgdiff {

const EvalReport::KMetrics& EvalReport::at_k(int k) const {
  for (const auto& m : per_k)
    if (m.k == k) return m;
  throw InvalidInputError("eval report: no metrics at k=" + std::to_string(k));
}

EvalReport evaluate(const std::vector<EvalQuery>& queries, const EvalOptions& opts) {
  if (queries.empty()) throw InvalidInputError("evaluate: no queries");
  EvalReport report;
  report.n_queries = static_cast<int>(queries.size());
  for (int k : opts.ks) report.per_k.push_back({k, 0.0, 0.0, 0.0, 0});

  for (const EvalQuery& q : queries) {
    const std::string truth_key = canonical_key(q.truth);
    const Fingerprint truth_fp = circular_fingerprint(q.truth, opts.fp_radius, opts.fp_bits);
    if (q.candidates.empty()) ++report.empty_candidate_queries;

    for (auto& m : report.per_k) {
      const int k = std::min<int>(m.k, static_cast<int>(q.candidates.size()));
      bool hit = false;
      double best_tanimoto = 0.0;
      std::optional<int> best_mces;
      for (int r = 0; r < k; ++r) {
        const MolecularGraph& cand = q.candidates[static_cast<std::size_t>(r)];
        if (!hit && canonical_key(cand) == truth_key) hit = true;
        best_tanimoto = std::max(
            best_tanimoto, tanimoto(truth_fp, circular_fingerprint(cand, opts.fp_radius, opts.fp_bits)));
        try {
          const int d = mces_distance(q.truth, cand, opts.mces_max_bonds);
          best_mces = best_mces ? std::min(*best_mces, d) : d;
        } catch (const UnsupportedSizeError&) {
          ++report.mces_skipped;
        }
      }
      m.accuracy += hit ? 1.0 : 0.0;
      m.tanimoto += best_tanimoto;
      // A query with no scorable candidate falls back to the distance from
      // the truth to the empty graph.
      if (best_mces) {
        m.mces += static_cast<double>(*best_mces);
        ++m.mces_scored;
      } else {
        m.mces += static_cast<double>(q.truth.n_bonds());
        ++m.mces_scored;
      }
    }
  }
  for (auto& m : report.per_k) {
    m.accuracy /= report.n_queries;
    m.tanimoto /= report.n_queries;
    m.mces /= std::max(1, m.mces_scored);
  }
  return report;
}

std::string report_to_json(const EvalReport& report, std::uint64_t config_hash) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["n_queries"] = report.n_queries;
  j["empty_candidate_queries"] = report.empty_candidate_queries;
  j["mces_skipped"] = report.mces_skipped;
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : report.per_k) {
    j["metrics"].push_back({{"k", m.k},
                            {"accuracy", m.accuracy},
                            {"mces", m.mces},
                            {"tanimoto", m.tanimoto}});
  }
  return j.dump(2);
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream os;
  os << "          ";
  for (const auto& m : report.per_k) os << "|        Top-" << m.k << "        ";
  os << "\nMetric    ";
  for (std::size_t i = 0; i < report.per_k.size(); ++i) os << "| Accuracy  MCES  Tanimoto";
  os << '\n';
  os << "Value     ";
  os.setf(std::ios::fixed);
  os.precision(4);
  for (const auto& m : report.per_k)
    os << "| " << m.accuracy << "  " << m.mces << "  " << m.tanimoto << ' ';
  os << '\n';
  return os.str();
}

std::vector<AsymmetrySummary> summarize_asymmetry(const std::vector<AsymmetryRecord>& records) {
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& r : records) grouped[r.bond_class].push_back(r.log2_ratio);
  std::vector<AsymmetrySummary> out;
  for (const auto& [cls, vals] : grouped) {
    AsymmetrySummary s;
    s.bond_class = cls;
    s.count = static_cast<int>(vals.size());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
    s.mean_log2 = mean;
    s.stderr_log2 = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size())) : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

AsymmetryResult attention_asymmetry(const DenoiserParams& params, const MolecularGraph& graph,
                                    const AtomVocab& vocab, const Tensor& raw_cond, int t_steps,
                                    std::uint64_t orientation_seed) {
  const int n = graph.n_atoms();
  if (n < 2) throw InvalidInputError("attention_asymmetry: need at least 2 atoms");
  const LineGraphIndex lg = build_line_graph(n);

  Graph g;
  ForwardOptions opts;
  opts.capture_attention = true;
  const Tensor projected = project_conditioning(params, raw_cond);
  opts.projected_cond = &projected;
  ForwardResult fr = denoiser_forward(g, params, graph, lg, Tensor(), 1, t_steps, opts);
  if (fr.capture.bonds_from_atoms_alpha.empty())
    throw NumericalError("attention_asymmetry: no attention capture produced");
  const Tensor& alpha = fr.capture.bonds_from_atoms_alpha.back();  // final layer, M x 2H
  const int heads = params.cfg.heads_cross;

  Rng rng(orientation_seed);
  AsymmetryResult result;
  for (int u = 0; u < lg.m_nodes(); ++u) {
    const auto [i, j] = lg.pair(u);
    const int type = graph.bond(i, j);
    if (type == 0) continue;

    double a_first = 0.0, a_second = 0.0;
    for (int head = 0; head < heads; ++head) {
      a_first += alpha(u, 2 * head);
      a_second += alpha(u, 2 * head + 1);
    }
    a_first /= heads;
    a_second /= heads;

    const double en_i = vocab.electronegativity[static_cast<std::size_t>(graph.atom_type(i))];
    const double en_j = vocab.electronegativity[static_cast<std::size_t>(graph.atom_type(j))];

    AsymmetryRecord rec;
    rec.i = i;
    rec.j = j;
    rec.bond_type = type;
    rec.homonuclear = graph.atom_type(i) == graph.atom_type(j);

    int low_atom, high_atom;
    double alpha_low, alpha_high;
    if (rec.homonuclear) {
      const bool flip = rng.uniform() < 0.5;
      low_atom = flip ? j : i;
      high_atom = flip ? i : j;
      alpha_low = flip ? a_second : a_first;
      alpha_high = flip ? a_first : a_second;
    } else if (en_i < en_j) {
      low_atom = i;
      high_atom = j;
      alpha_low = a_first;
      alpha_high = a_second;
    } else {
      low_atom = j;
      high_atom = i;
      alpha_low = a_second;
      alpha_high = a_first;
    }
    rec.bond_class = vocab.symbols[static_cast<std::size_t>(graph.atom_type(low_atom))] + "-" +
                     vocab.symbols[static_cast<std::size_t>(graph.atom_type(high_atom))];
    rec.alpha_low = alpha_low;
    rec.alpha_high = alpha_high;
    rec.log2_ratio = std::log2(alpha_low) - std::log2(alpha_high);
    result.records.push_back(std::move(rec));
  }
  result.summary = summarize_asymmetry(result.records);
  return result;
}

}  // namespace lgdiff
