//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/vocab.hpp"

#include <set>

namespace lgdiff {

double bond_order(int bond_class) {
  switch (bond_class) {
    case kNoBond: return 0.0;
    case kSingle: return 1.0;
    case kDouble: return 2.0;
    case kTriple: return 3.0;
    case kAromatic: return 1.5;
    default:
      throw InvalidInputError("unknown bond class " + std::to_string(bond_class));
  }
}

AtomVocab::AtomVocab(std::vector<std::string> syms, std::vector<double> val, std::vector<double> en)
    : symbols(std::move(syms)), max_valence(std::move(val)), electronegativity(std::move(en)) {
  if (symbols.empty() || symbols.size() != max_valence.size() || symbols.size() != electronegativity.size())
    throw InvalidInputError("vocab: symbol/valence/electronegativity lists must align");
  std::set<std::string> seen(symbols.begin(), symbols.end());
  if (seen.size() != symbols.size()) throw InvalidInputError("vocab: duplicate symbols");
  for (double v : max_valence)
    if (v < 1.0) throw InvalidInputError("vocab: max valence must be >= 1");
  for (double e : electronegativity)
    if (e <= 0.0) throw InvalidInputError("vocab: electronegativity must be positive");
}

int AtomVocab::index_of(const std::string& symbol) const {
  for (int i = 0; i < size(); ++i)
    if (symbols[static_cast<std::size_t>(i)] == symbol) return i;
  throw InvalidInputError("vocab: unknown atom symbol '" + symbol + "'");
}

const AtomVocab& AtomVocab::organic() {
  static const AtomVocab v({"C", "N", "O", "F", "S"}, {4.0, 3.0, 2.0, 1.0, 6.0},
                           {2.55, 3.04, 3.44, 3.98, 2.58});
  return v;
}

}  // namespace lgdiff
