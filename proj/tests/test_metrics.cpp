//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common/test_support.hpp"
#include "lgdiff/metrics.hpp"

using namespace lgdiff;
using lgdiff::testing::permute_graph;
using lgdiff::testing::random_graph;
using lgdiff::testing::random_permutation;
using lgdiff::testing::random_tensor;

namespace {

// Exhaustive MCES oracle: maximize agreeing edges over every injective
// atom-type-preserving partial vertex map.
int exhaustive_mces(const MolecularGraph& g1, const MolecularGraph& g2) {
  const int n1 = g1.n_atoms(), n2 = g2.n_atoms();
  std::vector<int> map12(static_cast<std::size_t>(n1), -1);
  std::vector<char> used2(static_cast<std::size_t>(n2), 0);
  int best = 0;

  auto count_edges = [&]() {
    int count = 0;
    for (int i = 0; i < n1; ++i)
      for (int j = i + 1; j < n1; ++j) {
        if (g1.bond(i, j) == 0) continue;
        const int mi = map12[static_cast<std::size_t>(i)];
        const int mj = map12[static_cast<std::size_t>(j)];
        if (mi >= 0 && mj >= 0 && g2.bond(mi, mj) == g1.bond(i, j)) ++count;
      }
    return count;
  };

  auto rec = [&](auto&& self, int atom) -> void {
    if (atom == n1) {
      best = std::max(best, count_edges());
      return;
    }
    self(self, atom + 1);  // leave unmapped
    for (int to = 0; to < n2; ++to) {
      if (used2[static_cast<std::size_t>(to)]) continue;
      if (g1.atom_type(atom) != g2.atom_type(to)) continue;
      map12[static_cast<std::size_t>(atom)] = to;
      used2[static_cast<std::size_t>(to)] = 1;
      self(self, atom + 1);
      map12[static_cast<std::size_t>(atom)] = -1;
      used2[static_cast<std::size_t>(to)] = 0;
    }
  };
  rec(rec, 0);
  return best;
}

MolecularGraph two_atom(int t0, int t1, int bond) {
  MolecularGraph g(std::vector<int>{t0, t1});
  if (bond > 0) g.set_bond(0, 1, bond);
  return g;
}

}  // namespace

TEST_CASE("fingerprints: isomorphism invariance, atom and bond sensitivity") {
  const AtomVocab& vocab = AtomVocab::organic();
  const int C = vocab.index_of("C");
  const int O = vocab.index_of("O");

  const Fingerprint fc = circular_fingerprint(MolecularGraph(std::vector<int>{C}));
  const Fingerprint fo = circular_fingerprint(MolecularGraph(std::vector<int>{O}));
  CHECK_FALSE(fc == fo);

  // Ethane vs ethene heavy-atom graphs differ only in the bond class.
  const Fingerprint ethane = circular_fingerprint(two_atom(C, C, kSingle));
  const Fingerprint ethene = circular_fingerprint(two_atom(C, C, kDouble));
  CHECK_FALSE(ethane == ethene);

  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + rng.uniform_int(6);
    const MolecularGraph g = random_graph(n, rng);
    const MolecularGraph h = permute_graph(g, random_permutation(n, rng));
    CHECK(circular_fingerprint(g) == circular_fingerprint(h));
  }
}

TEST_CASE("tanimoto: identity, disjoint, arithmetic, errors") {
  const AtomVocab& vocab = AtomVocab::organic();
  const int C = vocab.index_of("C");
  const Fingerprint a = circular_fingerprint(two_atom(C, C, kSingle));
  CHECK(tanimoto(a, a) == 1.0);

  Fingerprint x(64, 0), y(64, 0), z(64, 0);
  x.set(1);
  y.set(5);
  CHECK(tanimoto(x, y) == 0.0);
  CHECK(tanimoto(x, y) == tanimoto(y, x));

  // |and| = 1, |or| = 3.
  z.set(1);
  z.set(2);
  x.set(7);
  CHECK(tanimoto(x, z) == doctest::Approx(1.0 / 3.0));

  const Fingerprint empty1(64, 0), empty2(64, 0);
  CHECK(tanimoto(empty1, empty2) == 1.0);
  CHECK_THROWS_AS(tanimoto(x, Fingerprint(32, 0)), InvalidInputError);
}

TEST_CASE("mces: identities, single-bond case, symmetry, size cap") {
  const AtomVocab& vocab = AtomVocab::organic();
  const int C = vocab.index_of("C");
  Rng rng(7);
  const MolecularGraph g = random_graph(5, rng);
  CHECK(mces_distance(g, g) == 0);

  const MolecularGraph bonded = two_atom(C, C, kSingle);
  const MolecularGraph lonely(std::vector<int>{C, C});
  CHECK(mces_distance(bonded, lonely) == 1);
  CHECK(mces_distance(lonely, bonded) == 1);

  MolecularGraph big(std::vector<int>(8, C));
  for (int i = 0; i < 7; ++i) big.set_bond(i, i + 1, kSingle);
  for (int i = 0; i < 6; ++i) big.set_bond(i, i + 2, kSingle);
  CHECK(big.n_bonds() == 13);
  CHECK_THROWS_AS(mces_distance(big, big, 12), UnsupportedSizeError);
}

TEST_CASE("mces matches exhaustive enumeration on 200 random pairs of <=5 atoms") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n1 = 2 + rng.uniform_int(4);
    const int n2 = 2 + rng.uniform_int(4);
    const MolecularGraph g1 = random_graph(n1, rng, 3, 4, 0.55);
    const MolecularGraph g2 = random_graph(n2, rng, 3, 4, 0.55);
    const int want = exhaustive_mces(g1, g2);
    CHECK(mces_common_edges(g1, g2) == want);
    const int d = mces_distance(g1, g2);
    CHECK(d == g1.n_bonds() + g2.n_bonds() - 2 * want);
    CHECK(d >= std::abs(g1.n_bonds() - g2.n_bonds()));
    CHECK(mces_distance(g2, g1) == d);
  }
}

TEST_CASE("evaluate: hand-built three-query batch matches manual accounting") {
  const AtomVocab& vocab = AtomVocab::organic();
  const int C = vocab.index_of("C");
  const int O = vocab.index_of("O");

  // Truth A: C-C single. Truth B: C=O double. Truth C: C-C-C chain.
  const MolecularGraph truth_a = two_atom(C, C, kSingle);
  const MolecularGraph truth_b = two_atom(C, O, kDouble);
  MolecularGraph truth_c(std::vector<int>{C, C, C});
  truth_c.set_bond(0, 1, kSingle);
  truth_c.set_bond(1, 2, kSingle);

  std::vector<EvalQuery> queries(3);
  queries[0].truth = truth_a;
  queries[0].candidates = {truth_a, truth_b};  // hit at rank 1
  queries[1].truth = truth_b;
  queries[1].candidates = {truth_a, two_atom(C, O, kSingle), truth_b};  // hit at rank 3
  queries[2].truth = truth_c;
  queries[2].candidates = {};  // empty: miss with worst-case metrics

  EvalOptions opts;
  opts.ks = {1, 2, 10};
  const EvalReport report = evaluate(queries, opts);
  CHECK(report.n_queries == 3);
  CHECK(report.empty_candidate_queries == 1);

  // Top-1: only query A hits.
  CHECK(report.at_k(1).accuracy == doctest::Approx(1.0 / 3.0));
  // Top-2: still only A (B's truth sits at rank 3).
  CHECK(report.at_k(2).accuracy == doctest::Approx(1.0 / 3.0));
  // Top-10: A and B.
  CHECK(report.at_k(10).accuracy == doctest::Approx(2.0 / 3.0));

  // Tanimoto@1: A = 1; B compares to C-C single; C scores 0 (no candidates).
  const double tani_b1 = tanimoto(circular_fingerprint(truth_b), circular_fingerprint(truth_a));
  CHECK(report.at_k(1).tanimoto == doctest::Approx((1.0 + tani_b1 + 0.0) / 3.0));

  // MCES@1: A = 0; B vs C-C = 2 (no common typed edge); C falls back to its
  // own bond count (2).
  CHECK(report.at_k(1).mces == doctest::Approx((0.0 + 2.0 + 2.0) / 3.0));

  // Top-10 mces: A = 0, B = 0 (exact), C = 2.
  CHECK(report.at_k(10).mces == doctest::Approx((0.0 + 0.0 + 2.0) / 3.0));

  // Rank-5 style check: ground truth deeper in the list counts for higher k only.
  CHECK(report.at_k(10).tanimoto >= report.at_k(1).tanimoto);

  const std::string json = report_to_json(report, 1234);
  CHECK(json.find("\"config_hash\": 1234") != std::string::npos);
  const std::string table = report_to_table(report);
  CHECK(table.find("Accuracy") != std::string::npos);
}

TEST_CASE("asymmetry: antisymmetry under forced orientation swap and near-zero homonuclear mean") {
  const AtomVocab& vocab = AtomVocab::organic();
  DenoiserConfig cfg;
  cfg.n_layers = 1;
  cfg.d_x = 8;
  cfg.d_e = 8;
  cfg.d_y = 8;
  cfg.heads_primal = 2;
  cfg.heads_line = 2;
  cfg.heads_cross = 2;
  cfg.ffn_x = 8;
  cfg.ffn_e = 8;
  cfg.d_cond = 16;
  cfg.t_embed_dim = 4;
  DenoiserParams params = init_denoiser(cfg, 3);
  Rng rng(4);

  // Heteronuclear bond: orientation is fixed by electronegativity, so the
  // records are orientation-seed independent.
  MolecularGraph co(std::vector<int>{vocab.index_of("C"), vocab.index_of("O")});
  co.set_bond(0, 1, kSingle);
  const Tensor cond = random_tensor({1, cfg.d_cond}, rng);
  const AsymmetryResult r1 = attention_asymmetry(params, co, vocab, cond, 10, 1);
  const AsymmetryResult r2 = attention_asymmetry(params, co, vocab, cond, 10, 2);
  REQUIRE(r1.records.size() == 1);
  CHECK(r1.records[0].bond_class == "C-O");
  CHECK_FALSE(r1.records[0].homonuclear);
  CHECK(r1.records[0].log2_ratio == r2.records[0].log2_ratio);
  CHECK(r1.records[0].log2_ratio ==
        std::log2(r1.records[0].alpha_low) - std::log2(r1.records[0].alpha_high));

  // Homonuclear: swapping the orientation negates log2 r exactly. The C-C
  // bond needs an asymmetric environment, otherwise both weights are 1/2.
  MolecularGraph cco(std::vector<int>{vocab.index_of("C"), vocab.index_of("C"), vocab.index_of("O")});
  cco.set_bond(0, 1, kSingle);
  cco.set_bond(1, 2, kSingle);
  bool seen_both = false;
  const AsymmetryResult base = attention_asymmetry(params, cco, vocab, cond, 10, 1);
  REQUIRE(base.records.size() == 2);
  REQUIRE(base.records[0].homonuclear);  // pair (0,1) comes first
  CHECK(base.records[0].log2_ratio != 0.0);
  for (std::uint64_t seed = 2; seed < 40 && !seen_both; ++seed) {
    const AsymmetryResult flip = attention_asymmetry(params, cco, vocab, cond, 10, seed);
    if (flip.records[0].alpha_low != base.records[0].alpha_low) {
      CHECK(flip.records[0].log2_ratio == -base.records[0].log2_ratio);
      seen_both = true;
    }
  }
  CHECK(seen_both);

  // Random orientation drives the homonuclear mean toward zero: aggregate
  // many C-C bonds from random graphs.
  std::vector<AsymmetryRecord> pool;
  Rng gen(9);
  int graph_seed = 0;
  while (pool.size() < 200) {
    MolecularGraph g = random_graph(5, gen, 2, 5, 0.6);
    const AsymmetryResult res =
        attention_asymmetry(params, g, vocab, cond, 10, static_cast<std::uint64_t>(graph_seed++));
    for (const auto& rec : res.records)
      if (rec.homonuclear) pool.push_back(rec);
  }
  const auto summary = summarize_asymmetry(pool);
  double mean = 0.0, count = 0.0, stderr_pooled = 0.0;
  for (const auto& rec : pool) {
    mean += rec.log2_ratio;
    count += 1.0;
  }
  mean /= count;
  double var = 0.0;
  for (const auto& rec : pool) var += (rec.log2_ratio - mean) * (rec.log2_ratio - mean);
  var /= (count - 1.0);
  stderr_pooled = std::sqrt(var / count);
  CHECK(std::abs(mean) < 3.0 * stderr_pooled + 1e-9);
  CHECK_FALSE(summary.empty());
}
