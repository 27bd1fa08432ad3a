//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/mces.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace lgdiff {

namespace {

struct McesSearch {
  const std::vector<std::array<int, 3>>* edges1;
  const std::vector<std::array<int, 3>>* edges2;
  const MolecularGraph* g1;
  const MolecularGraph* g2;
  std::vector<int> map12;      // g1 atom -> g2 atom or -1
  std::vector<int> map21;      // g2 atom -> g1 atom or -1
  std::vector<char> used2;     // g2 edge consumed
  int best = 0;

  void run(std::size_t idx, int matched) {
    const int rem1 = static_cast<int>(edges1->size() - idx);
    const int rem2 = static_cast<int>(edges2->size()) - matched;
    if (matched + std::min(rem1, rem2) <= best) return;
    if (idx == edges1->size()) {
      best = std::max(best, matched);
      return;
    }
    const auto [a, b, t] = (*edges1)[idx];
    for (std::size_t e2 = 0; e2 < edges2->size(); ++e2) {
      if (used2[e2]) continue;
      const auto [c, d, t2] = (*edges2)[e2];
      if (t2 != t) continue;
      for (int orient = 0; orient < 2; ++orient) {
        const int x = orient == 0 ? c : d;
        const int y = orient == 0 ? d : c;
        if (g1->atom_type(a) != g2->atom_type(x) || g1->atom_type(b) != g2->atom_type(y)) continue;
        const bool a_free = map12[static_cast<std::size_t>(a)] < 0;
        const bool b_free = map12[static_cast<std::size_t>(b)] < 0;
        if (!a_free && map12[static_cast<std::size_t>(a)] != x) continue;
        if (!b_free && map12[static_cast<std::size_t>(b)] != y) continue;
        if (a_free && map21[static_cast<std::size_t>(x)] >= 0) continue;
        if (b_free && map21[static_cast<std::size_t>(y)] >= 0) continue;
        if (a_free) {
          map12[static_cast<std::size_t>(a)] = x;
          map21[static_cast<std::size_t>(x)] = a;
        }
        if (b_free) {
          map12[static_cast<std::size_t>(b)] = y;
          map21[static_cast<std::size_t>(y)] = b;
        }
        used2[e2] = 1;
        run(idx + 1, matched + 1);
        used2[e2] = 0;
        if (a_free) {
          map12[static_cast<std::size_t>(a)] = -1;
          map21[static_cast<std::size_t>(x)] = -1;
        }
        if (b_free) {
          map12[static_cast<std::size_t>(b)] = -1;
          map21[static_cast<std::size_t>(y)] = -1;
        }
      }
    }
    run(idx + 1, matched);  // leave this edge unmatched
  }
};

}  // namespace

int mces_common_edges(const MolecularGraph& g1, const MolecularGraph& g2, int max_bonds) {
  const auto e1 = g1.bond_list();
  const auto e2 = g2.bond_list();
  if (static_cast<int>(e1.size()) > max_bonds || static_cast<int>(e2.size()) > max_bonds)
    throw UnsupportedSizeError("mces: graph exceeds the " + std::to_string(max_bonds) + "-bond cap");
  if (e1.empty() || e2.empty()) return 0;

  // Search over the smaller edge set.
  const bool swap = e1.size() > e2.size();
  McesSearch s;
  s.edges1 = swap ? &e2 : &e1;
  s.edges2 = swap ? &e1 : &e2;
  s.g1 = swap ? &g2 : &g1;
  s.g2 = swap ? &g1 : &g2;
  s.map12.assign(static_cast<std::size_t>(s.g1->n_atoms()), -1);
  s.map21.assign(static_cast<std::size_t>(s.g2->n_atoms()), -1);
  s.used2.assign(s.edges2->size(), 0);
  s.run(0, 0);
  return s.best;
}

int mces_distance(const MolecularGraph& g1, const MolecularGraph& g2, int max_bonds) {
  const int common = mces_common_edges(g1, g2, max_bonds);
  return g1.n_bonds() + g2.n_bonds() - 2 * common;
}

}  // namespace lgdiff
