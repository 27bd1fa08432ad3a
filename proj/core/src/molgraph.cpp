//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/molgraph.hpp"

#include <algorithm>
#include <cctype>

namespace lgdiff {

std::vector<std::array<int, 3>> MolecularGraph::bond_list() const {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < n_atoms(); ++i)
    for (int j = i + 1; j < n_atoms(); ++j)
      if (bond(i, j) > 0) out.push_back({i, j, bond(i, j)});
  return out;
}

int MolecularGraph::n_bonds() const {
  int count = 0;
  for (int i = 0; i < n_atoms(); ++i)
    for (int j = i + 1; j < n_atoms(); ++j)
      if (bond(i, j) > 0) ++count;
  return count;
}

bool MolecularGraph::is_connected() const {
  const int n = n_atoms();
  if (n <= 1) return true;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (bond(i, j) > 0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

int LineGraphIndex::pair_index(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_atoms_ || j >= n_atoms_)
    throw InvalidInputError("pair_index: invalid atom pair");
  if (i > j) std::swap(i, j);
  const int offset = i * (2 * n_atoms_ - i - 1) / 2;
  return offset + (j - i - 1);
}

LineGraphIndex build_line_graph(int n_atoms) {
  if (n_atoms < 2) throw InvalidInputError("build_line_graph: need at least 2 atoms");
  LineGraphIndex lg;
  lg.n_atoms_ = n_atoms;
  lg.pairs_.reserve(static_cast<std::size_t>(n_atoms) * (n_atoms - 1) / 2);
  for (int i = 0; i < n_atoms; ++i)
    for (int j = i + 1; j < n_atoms; ++j) lg.pairs_.emplace_back(i, j);

  const int m = lg.m_nodes();
  lg.adjacency_.assign(static_cast<std::size_t>(m) * m, 0);
  lg.incidence_.assign(static_cast<std::size_t>(n_atoms) * m, 0);
  for (int u = 0; u < m; ++u) {
    const auto [i, j] = lg.pairs_[static_cast<std::size_t>(u)];
    lg.incidence_[static_cast<std::size_t>(i) * m + u] = 1;
    lg.incidence_[static_cast<std::size_t>(j) * m + u] = 1;
    for (int v = u + 1; v < m; ++v) {
      const auto [k, l] = lg.pairs_[static_cast<std::size_t>(v)];
      if (i == k || i == l || j == k || j == l) {
        lg.adjacency_[static_cast<std::size_t>(u) * m + v] = 1;
        lg.adjacency_[static_cast<std::size_t>(v) * m + u] = 1;
      }
    }
  }
  return lg;
}

std::vector<int> MotifSummary::ring_lengths() const {
  std::vector<int> out;
  out.reserve(rings.size());
  for (const auto& r : rings) out.push_back(static_cast<int>(r.size()));
  return out;
}

namespace {
constexpr int kMaxRingLength = 8;

// All simple cycles of length 3..kMaxRingLength. Each cycle is emitted once:
// the start atom is the cycle minimum and the orientation is fixed by
// requiring the second atom to be smaller than the last.
void enumerate_rings(const MolecularGraph& g, const LineGraphIndex& lg,
                     std::vector<std::vector<int>>& rings) {
  const int n = g.n_atoms();
  std::vector<int> path;
  std::vector<char> in_path(static_cast<std::size_t>(n), 0);

  auto dfs = [&](auto&& self, int start, int current) -> void {
    if (static_cast<int>(path.size()) > kMaxRingLength) return;
    for (int next = 0; next < n; ++next) {
      if (g.bond(current, next) == 0) continue;
      if (next == start && path.size() >= 3) {
        if (path[1] < path.back()) {
          std::vector<int> ring_bonds;
          ring_bonds.reserve(path.size());
          for (std::size_t k = 0; k < path.size(); ++k) {
            const int a = path[k];
            const int b = path[(k + 1) % path.size()];
            ring_bonds.push_back(lg.pair_index(a, b));
          }
          rings.push_back(std::move(ring_bonds));
        }
        continue;
      }
      if (next <= start || in_path[static_cast<std::size_t>(next)]) continue;
      if (static_cast<int>(path.size()) == kMaxRingLength) continue;
      path.push_back(next);
      in_path[static_cast<std::size_t>(next)] = 1;
      self(self, start, next);
      in_path[static_cast<std::size_t>(next)] = 0;
      path.pop_back();
    }
  };

  for (int start = 0; start < n; ++start) {
    path.assign(1, start);
    in_path.assign(static_cast<std::size_t>(n), 0);
    in_path[static_cast<std::size_t>(start)] = 1;
    dfs(dfs, start, start);
  }
}
}  // namespace

MotifSummary extract_motifs(const MolecularGraph& g, const LineGraphIndex& lg) {
  if (lg.n_atoms() != g.n_atoms())
    throw InvalidInputError("extract_motifs: line graph was built for a different atom count");
  MotifSummary out;
  const int m = lg.m_nodes();

  std::vector<char> actual(static_cast<std::size_t>(m), 0);
  for (int u = 0; u < m; ++u) {
    const auto [i, j] = lg.pair(u);
    actual[static_cast<std::size_t>(u)] = g.bond(i, j) > 0 ? 1 : 0;
  }

  for (int u = 0; u < m; ++u) {
    if (!actual[static_cast<std::size_t>(u)]) continue;
    for (int v = u + 1; v < m; ++v)
      if (actual[static_cast<std::size_t>(v)] && lg.adjacent(u, v)) out.angle_pairs.emplace_back(u, v);
  }

  // A dihedral is three chained bonds over four distinct atoms.
  for (int v = 0; v < m; ++v) {
    if (!actual[static_cast<std::size_t>(v)]) continue;
    for (int u = 0; u < m; ++u) {
      if (u == v || !actual[static_cast<std::size_t>(u)] || !lg.adjacent(u, v)) continue;
      for (int w = u + 1; w < m; ++w) {
        if (w == v || !actual[static_cast<std::size_t>(w)] || !lg.adjacent(v, w)) continue;
        const auto [a1, a2] = lg.pair(u);
        const auto [b1, b2] = lg.pair(v);
        const auto [c1, c2] = lg.pair(w);
        std::vector<int> atoms_in{a1, a2, b1, b2, c1, c2};
        std::sort(atoms_in.begin(), atoms_in.end());
        atoms_in.erase(std::unique(atoms_in.begin(), atoms_in.end()), atoms_in.end());
        if (atoms_in.size() == 4) out.dihedral_triples.push_back({u, v, w});
      }
    }
  }

  enumerate_rings(g, lg, out.rings);
  return out;
}

ValenceReport check_valence(const MolecularGraph& g, const AtomVocab& vocab) {
  ValenceReport report;
  const int n = g.n_atoms();
  report.atoms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int type = g.atom_type(i);
    if (type < 0 || type >= vocab.size())
      throw InvalidInputError("check_valence: atom " + std::to_string(i) + " has unknown type " +
                              std::to_string(type));
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) sum += bond_order(g.bond(i, j));
    const double cap = vocab.max_valence[static_cast<std::size_t>(type)];
    const bool ok = sum <= cap + 1e-9;
    report.atoms.push_back({i, sum, cap, ok});
    if (!ok) report.valid = false;
  }
  return report;
}

int Formula::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

Formula Formula::parse(const std::string& text, const AtomVocab& vocab) {
  Formula f;
  f.counts.assign(static_cast<std::size_t>(vocab.size()), 0);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t sym_end = pos + 1;
    while (sym_end < text.size() && std::islower(static_cast<unsigned char>(text[sym_end]))) ++sym_end;
    const std::string symbol = text.substr(pos, sym_end - pos);
    pos = sym_end;
    int count = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      count = count * 10 + (text[pos] - '0');
      ++pos;
    }
    if (count == 0) count = 1;
    f.counts[static_cast<std::size_t>(vocab.index_of(symbol))] += count;
  }
  if (f.total() == 0) throw InvalidInputError("formula: empty atom multiset");
  return f;
}

std::string Formula::to_string(const AtomVocab& vocab) const {
  std::string out;
  for (int i = 0; i < static_cast<int>(counts.size()); ++i) {
    if (counts[static_cast<std::size_t>(i)] == 0) continue;
    out += vocab.symbols[static_cast<std::size_t>(i)];
    out += std::to_string(counts[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace lgdiff
