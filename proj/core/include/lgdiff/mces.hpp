//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include "lgdiff/molgraph.hpp"

namespace lgdiff {

// Number of edges in a maximum common edge subgraph under atom- and
// bond-type-preserving mapping. Exact branch-and-bound; throws
// UnsupportedSizeError when either graph exceeds max_bonds.
int mces_common_edges(const MolecularGraph& g1, const MolecularGraph& g2, int max_bonds = 12);

// Distance d = |E1| + |E2| - 2 * |MCES|.
int mces_distance(const MolecularGraph& g1, const MolecularGraph& g2, int max_bonds = 12);

}  // namespace lgdiff
