//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include <algorithm>
#include <vector>

#include "lgdiff/molgraph.hpp"

namespace lgdiff {

namespace {

// Sampling weights over bond classes {single, double, triple, aromatic}.
constexpr double kTypeWeights[4] = {0.62, 0.18, 0.04, 0.16};

int pick_bond_type(Rng& rng, double cap_u, double cap_v) {
  double weights[4];
  double total = 0.0;
  for (int t = 0; t < 4; ++t) {
    const double order = bond_order(t + 1);
    weights[t] = (order <= cap_u + 1e-9 && order <= cap_v + 1e-9) ? kTypeWeights[t] : 0.0;
    total += weights[t];
  }
  if (total <= 0.0) return 0;
  for (double& w : weights) w /= total;
  return rng.categorical(weights, 4) + 1;
}

}  // namespace

MolecularGraph random_molecule(const Formula& formula, std::uint64_t seed, const AtomVocab& vocab,
                               const RandomMoleculeOptions& opts) {
  if (static_cast<int>(formula.counts.size()) != vocab.size())
    throw InvalidInputError("random_molecule: formula does not match vocab size");
  const int n = formula.total();
  if (n < 1) throw InvalidInputError("random_molecule: empty formula");
  if (n > opts.max_atoms)
    throw InvalidInputError("random_molecule: formula has " + std::to_string(n) + " atoms, cap is " +
                            std::to_string(opts.max_atoms));

  std::vector<int> atom_types;
  atom_types.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < vocab.size(); ++t)
    for (int c = 0; c < formula.counts[static_cast<std::size_t>(t)]; ++c) atom_types.push_back(t);

  if (n == 1) return MolecularGraph(atom_types);

  Rng rng(seed);
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    MolecularGraph g(atom_types);
    std::vector<double> caps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) caps[static_cast<std::size_t>(i)] = vocab.max_valence[static_cast<std::size_t>(atom_types[static_cast<std::size_t>(i)])];

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.uniform_int(i + 1))]);

    // Random spanning tree under valence capacities.
    bool ok = true;
    for (int k = 1; k < n && ok; ++k) {
      const int v = order[static_cast<std::size_t>(k)];
      std::vector<int> hosts;
      for (int a = 0; a < k; ++a) {
        const int u = order[static_cast<std::size_t>(a)];
        if (caps[static_cast<std::size_t>(u)] >= 1.0 - 1e-9 && caps[static_cast<std::size_t>(v)] >= 1.0 - 1e-9)
          hosts.push_back(u);
      }
      if (hosts.empty()) {
        ok = false;
        break;
      }
      const int u = hosts[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(hosts.size())))];
      const int type = pick_bond_type(rng, caps[static_cast<std::size_t>(u)], caps[static_cast<std::size_t>(v)]);
      if (type == 0) {
        ok = false;
        break;
      }
      g.set_bond(u, v, type);
      caps[static_cast<std::size_t>(u)] -= bond_order(type);
      caps[static_cast<std::size_t>(v)] -= bond_order(type);
    }
    if (!ok) continue;

    // Optional ring-forming extras.
    for (int t = 0; t < n; ++t) {
      if (rng.uniform() >= opts.extra_bond_rate * 0.5) continue;
      const int i = rng.uniform_int(n);
      const int j = rng.uniform_int(n);
      if (i == j || g.bond(i, j) != 0) continue;
      const int type = pick_bond_type(rng, caps[static_cast<std::size_t>(i)], caps[static_cast<std::size_t>(j)]);
      if (type == 0) continue;
      g.set_bond(i, j, type);
      caps[static_cast<std::size_t>(i)] -= bond_order(type);
      caps[static_cast<std::size_t>(j)] -= bond_order(type);
    }

    if (g.is_connected() && check_valence(g, vocab).valid) return g;
  }
  throw GenerationError("random_molecule: no valid graph found for formula within retry budget");
}

}  // namespace lgdiff
