//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/fingerprint.hpp"

#include <algorithm>
#include <bit>

namespace lgdiff {

int Fingerprint::popcount() const {
  int c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

namespace {
std::uint64_t mix2(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }
}  // namespace

Fingerprint circular_fingerprint(const MolecularGraph& g, int radius, int n_bits) {
  if (radius < 0 || n_bits < 1) throw InvalidInputError("fingerprint: radius >= 0 and n_bits >= 1 required");
  Fingerprint fp(n_bits, radius);
  const int n = g.n_atoms();

  // Round 0: atom identifier from (type, degree, sorted bond-order multiset).
  std::vector<std::uint64_t> id(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> orders;
    for (int j = 0; j < n; ++j)
      if (j != i && g.bond(i, j) > 0) orders.push_back(g.bond(i, j));
    std::sort(orders.begin(), orders.end());
    std::uint64_t h = mix2(0x5eedf00d, static_cast<std::uint64_t>(g.atom_type(i)));
    h = mix2(h, static_cast<std::uint64_t>(orders.size()));
    for (int o : orders) h = mix2(h, static_cast<std::uint64_t>(o));
    id[static_cast<std::size_t>(i)] = h;
  }
  for (std::uint64_t h : id) fp.set(static_cast<int>(h % static_cast<std::uint64_t>(n_bits)));

  // Rounds 1..radius: fold in the sorted (bond type, neighbor id) list.
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, std::uint64_t>> env;
      for (int j = 0; j < n; ++j)
        if (j != i && g.bond(i, j) > 0) env.emplace_back(g.bond(i, j), id[static_cast<std::size_t>(j)]);
      std::sort(env.begin(), env.end());
      std::uint64_t h = mix2(static_cast<std::uint64_t>(r), id[static_cast<std::size_t>(i)]);
      for (const auto& [bond, nid] : env) {
        h = mix2(h, static_cast<std::uint64_t>(bond));
        h = mix2(h, nid);
      }
      next[static_cast<std::size_t>(i)] = h;
    }
    id = std::move(next);
    for (std::uint64_t h : id) fp.set(static_cast<int>(h % static_cast<std::uint64_t>(n_bits)));
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.n_bits() != b.n_bits())
    throw InvalidInputError("tanimoto: fingerprint sizes differ");
  int inter = 0, uni = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    inter += std::popcount(a.words()[w] & b.words()[w]);
    uni += std::popcount(a.words()[w] | b.words()[w]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> fingerprint_to_dense(const Fingerprint& fp) {
  std::vector<double> out(static_cast<std::size_t>(fp.n_bits()), 0.0);
  for (int b = 0; b < fp.n_bits(); ++b)
    if (fp.test(b)) out[static_cast<std::size_t>(b)] = 1.0;
  return out;
}

}  // namespace lgdiff
