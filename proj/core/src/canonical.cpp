//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
// Canonical form via iterative color refinement plus backtracking over the
// remaining symmetric cells. Exact: two graphs get equal keys iff they are
// isomorphic respecting atom and bond types.
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "lgdiff/molgraph.hpp"

namespace lgdiff {

namespace {

using Colors = std::vector<int>;

// One refinement sweep: recolor atoms by (color, multiset of (bond, color)).
// Returns true if the partition changed.
bool refine_once(const MolecularGraph& g, Colors& colors) {
  const int n = g.n_atoms();
  using Sig = std::pair<int, std::vector<std::pair<int, int>>>;
  std::vector<Sig> sigs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, int>> neigh;
    neigh.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) neigh.emplace_back(g.bond(i, j), colors[static_cast<std::size_t>(j)]);
    std::sort(neigh.begin(), neigh.end());
    sigs[static_cast<std::size_t>(i)] = {colors[static_cast<std::size_t>(i)], std::move(neigh)};
  }
  std::map<Sig, int> order;
  for (const Sig& s : sigs) order.emplace(s, 0);
  int next = 0;
  for (auto& [sig, id] : order) id = next++;
  Colors fresh(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fresh[static_cast<std::size_t>(i)] = order[sigs[static_cast<std::size_t>(i)]];
  const bool changed = fresh != colors;
  colors = std::move(fresh);
  return changed;
}

void refine(const MolecularGraph& g, Colors& colors) {
  while (refine_once(g, colors)) {
  }
}

std::vector<int> ordering_from_colors(const Colors& colors) {
  std::vector<int> order(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return colors[static_cast<std::size_t>(a)] < colors[static_cast<std::size_t>(b)]; });
  return order;
}

std::vector<int> encode(const MolecularGraph& g, const std::vector<int>& order) {
  const int n = g.n_atoms();
  std::vector<int> code;
  code.reserve(static_cast<std::size_t>(n) + static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) code.push_back(g.atom_type(order[static_cast<std::size_t>(i)]));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      code.push_back(g.bond(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]));
  return code;
}

struct SearchState {
  const MolecularGraph* g = nullptr;
  std::vector<int> best;
  bool have_best = false;
  long leaves = 0;
  // Realistic molecules refine to discrete partitions almost immediately;
  // the budget guards against adversarial fully-symmetric inputs.
  static constexpr long kLeafBudget = 2'000'000;
};

int first_symmetric_cell(const Colors& colors) {
  std::map<int, int> count;
  for (int c : colors) ++count[c];
  int best_color = -1;
  for (const auto& [c, k] : count)
    if (k > 1) {
      best_color = c;
      break;
    }
  return best_color;
}

void search(SearchState& st, Colors colors) {
  refine(*st.g, colors);
  const int cell = first_symmetric_cell(colors);
  if (cell < 0) {
    if (++st.leaves > SearchState::kLeafBudget)
      throw UnsupportedSizeError("canonical_key: symmetry search budget exceeded");
    std::vector<int> code = encode(*st.g, ordering_from_colors(colors));
    if (!st.have_best || code < st.best) {
      st.best = std::move(code);
      st.have_best = true;
    }
    return;
  }
  // Individualize each member of the first symmetric cell in turn.
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if (colors[i] != cell) continue;
    Colors child = colors;
    for (std::size_t j = 0; j < child.size(); ++j)
      if (child[j] >= cell && j != i) child[j] += 1;
    search(st, std::move(child));
  }
}

}  // namespace

std::string canonical_key(const MolecularGraph& g, int max_atoms) {
  if (g.n_atoms() > max_atoms)
    throw UnsupportedSizeError("canonical_key: graph has " + std::to_string(g.n_atoms()) +
                               " atoms, cap is " + std::to_string(max_atoms));
  SearchState st;
  st.g = &g;
  Colors colors(static_cast<std::size_t>(g.n_atoms()));
  for (int i = 0; i < g.n_atoms(); ++i) colors[static_cast<std::size_t>(i)] = g.atom_type(i);
  search(st, std::move(colors));

  static constexpr char kHex[] = "0123456789abcdef";
  std::string key = "g1:";
  key.reserve(st.best.size() + 3);
  for (int v : st.best) {
    if (v < 0 || v > 15)
      throw UnsupportedSizeError("canonical_key: type values beyond hex range");
    key.push_back(kHex[v]);
  }
  return key;
}

}  // namespace lgdiff
