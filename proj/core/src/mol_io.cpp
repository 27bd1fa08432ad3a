//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include <fstream>

#include <json.hpp>

#include "lgdiff/molgraph.hpp"

namespace lgdiff {

std::string molecule_to_json(const MolecularGraph& g, const AtomVocab& vocab) {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (int t : g.atom_types()) j["atoms"].push_back(vocab.symbols[static_cast<std::size_t>(t)]);
  j["bonds"] = nlohmann::json::array();
  for (const auto& [i, k, type] : g.bond_list()) j["bonds"].push_back({i, k, type});
  return j.dump();
}

MolecularGraph molecule_from_json(const std::string& line, const AtomVocab& vocab) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("molecule record: invalid JSON: ") + e.what());
  }
  if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
    throw InvalidInputError("molecule record: missing or empty 'atoms'");
  std::vector<int> types;
  for (const auto& s : j["atoms"]) types.push_back(vocab.index_of(s.get<std::string>()));
  MolecularGraph g(types);
  if (j.contains("bonds")) {
    for (const auto& b : j["bonds"]) {
      if (!b.is_array() || b.size() != 3)
        throw InvalidInputError("molecule record: bond entries must be [i, j, type]");
      const int i = b[0].get<int>();
      const int k = b[1].get<int>();
      const int type = b[2].get<int>();
      if (i < 0 || k < 0 || i >= g.n_atoms() || k >= g.n_atoms() || i >= k)
        throw InvalidInputError("molecule record: bond endpoints must satisfy 0 <= i < j < n");
      if (type < 1 || type > kBondTypes)
        throw InvalidInputError("molecule record: bond type out of range");
      g.set_bond(i, k, type);
    }
  }
  return g;
}

void write_molecules_jsonl(const std::string& path, const std::vector<MolecularGraph>& mols,
                           const AtomVocab& vocab) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InvalidInputError("cannot open '" + path + "' for writing");
  for (const auto& g : mols) os << molecule_to_json(g, vocab) << '\n';
  if (!os) throw InvalidInputError("write to '" + path + "' failed");
}

std::vector<MolecularGraph> read_molecules_jsonl(const std::string& path, const AtomVocab& vocab) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot open '" + path + "'");
  std::vector<MolecularGraph> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(molecule_from_json(line, vocab));
  }
  return out;
}

}  // namespace lgdiff
