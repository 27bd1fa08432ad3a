//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <vector>

#include "lgdiff/errors.hpp"

namespace lgdiff {

// Bond classes: 0 = none, 1 = single, 2 = double, 3 = triple, 4 = aromatic.
constexpr int kNoBond = 0;
constexpr int kSingle = 1;
constexpr int kDouble = 2;
constexpr int kTriple = 3;
constexpr int kAromatic = 4;
constexpr int kBondTypes = 4;  // actual bond types, excluding "none"

// Effective valence order per bond class; aromatic counts 1.5.
double bond_order(int bond_class);

struct AtomVocab {
  std::vector<std::string> symbols;
  std::vector<double> max_valence;
  std::vector<double> electronegativity;  // Pauling scale

  AtomVocab() = default;
  AtomVocab(std::vector<std::string> syms, std::vector<double> val, std::vector<double> en);

  int size() const { return static_cast<int>(symbols.size()); }
  int index_of(const std::string& symbol) const;  // throws on unknown symbol

  // {C, N, O, F, S} with standard valences and electronegativities.
  static const AtomVocab& organic();
};

}  // namespace lgdiff
