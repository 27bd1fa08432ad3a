//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lgdiff/rng.hpp"
#include "lgdiff/vocab.hpp"

namespace lgdiff {

// Heavy-atom molecular graph: atom type indices plus a symmetric categorical
// bond matrix with a zero diagonal.
class MolecularGraph {
 public:
  MolecularGraph() = default;
  explicit MolecularGraph(std::vector<int> atom_types)
      : atom_types_(std::move(atom_types)),
        bonds_(static_cast<std::size_t>(n_atoms()) * n_atoms(), 0) {
    if (atom_types_.empty()) throw InvalidInputError("molecular graph needs at least one atom");
  }

  int n_atoms() const { return static_cast<int>(atom_types_.size()); }
  const std::vector<int>& atom_types() const { return atom_types_; }
  int atom_type(int i) const { return atom_types_[static_cast<std::size_t>(i)]; }

  int bond(int i, int j) const { return bonds_[static_cast<std::size_t>(i) * n_atoms() + j]; }
  void set_bond(int i, int j, int type) {
    if (i == j) throw InvalidInputError("bond endpoints must differ");
    bonds_[static_cast<std::size_t>(i) * n_atoms() + j] = type;
    bonds_[static_cast<std::size_t>(j) * n_atoms() + i] = type;
  }

  // Actual bonds (type > 0) as (i, j, type) with i < j, lexicographic.
  std::vector<std::array<int, 3>> bond_list() const;
  int n_bonds() const;

  bool is_connected() const;

  bool operator==(const MolecularGraph& o) const {
    return atom_types_ == o.atom_types_ && bonds_ == o.bonds_;
  }

 private:
  std::vector<int> atom_types_;
  std::vector<int> bonds_;
};

// Enumeration of all atom pairs of an N-atom graph, the line-graph adjacency
// between pairs sharing an endpoint, and the atom/pair incidence matrix.
class LineGraphIndex {
 public:
  int n_atoms() const { return n_atoms_; }
  int m_nodes() const { return static_cast<int>(pairs_.size()); }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::pair<int, int> pair(int u) const { return pairs_[static_cast<std::size_t>(u)]; }

  int pair_index(int i, int j) const;  // i != j, order-insensitive

  bool adjacent(int u, int v) const {
    return adjacency_[static_cast<std::size_t>(u) * m_nodes() + v] != 0;
  }
  bool incident(int atom, int u) const {
    return incidence_[static_cast<std::size_t>(atom) * m_nodes() + u] != 0;
  }

  const std::vector<std::uint8_t>& adjacency() const { return adjacency_; }
  const std::vector<std::uint8_t>& incidence() const { return incidence_; }

  friend LineGraphIndex build_line_graph(int n_atoms);

 private:
  int n_atoms_ = 0;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::uint8_t> adjacency_;  // M x M
  std::vector<std::uint8_t> incidence_;  // N x M
};

LineGraphIndex build_line_graph(int n_atoms);

// Bond-level topological motifs of the actual bonds of a graph: line-graph
// edges (bond angles), length-2 line-graph paths over four distinct atoms
// (dihedrals), and molecular rings as bond cycles.
struct MotifSummary {
  std::vector<std::pair<int, int>> angle_pairs;       // line-node ids, u < v
  std::vector<std::array<int, 3>> dihedral_triples;   // line-node ids (u, v, w), u < w
  std::vector<std::vector<int>> rings;                // bond cycles, one entry per ring
  std::vector<int> ring_lengths() const;
};

// Rings are reported as all simple cycles of length 3..8; the cap is a
// documented choice, see README.
MotifSummary extract_motifs(const MolecularGraph& g, const LineGraphIndex& lg);

struct ValenceReport {
  struct AtomEntry {
    int atom;
    double order_sum;
    double capacity;
    bool ok;
  };
  bool valid = true;
  std::vector<AtomEntry> atoms;
};

ValenceReport check_valence(const MolecularGraph& g, const AtomVocab& vocab);

// Canonical form respecting atom and bond types: equal keys iff isomorphic.
// Exact (refinement + backtracking search); capped at max_atoms.
std::string canonical_key(const MolecularGraph& g, int max_atoms = 16);

// Atom multiset, as counts per vocab index.
struct Formula {
  std::vector<int> counts;
  int total() const;
  static Formula parse(const std::string& text, const AtomVocab& vocab);  // e.g. "C4N1O2"
  std::string to_string(const AtomVocab& vocab) const;
};

struct RandomMoleculeOptions {
  int max_atoms = 16;
  int max_retries = 64;
  double extra_bond_rate = 0.45;  // expected ring-forming bonds per molecule, scaled by size
};

// Connected, valence-valid graph over exactly the given atom multiset;
// deterministic per seed.
MolecularGraph random_molecule(const Formula& formula, std::uint64_t seed, const AtomVocab& vocab,
                               const RandomMoleculeOptions& opts = {});

// ---- JSONL records ----
// {"atoms":["C","O",...],"bonds":[[i,j,type],...]} with i<j in lexicographic
// order and type in {1..4}.
std::string molecule_to_json(const MolecularGraph& g, const AtomVocab& vocab);
MolecularGraph molecule_from_json(const std::string& line, const AtomVocab& vocab);
void write_molecules_jsonl(const std::string& path, const std::vector<MolecularGraph>& mols,
                           const AtomVocab& vocab);
std::vector<MolecularGraph> read_molecules_jsonl(const std::string& path, const AtomVocab& vocab);

}  // namespace lgdiff
