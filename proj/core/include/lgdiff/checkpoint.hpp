//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lgdiff/tensor.hpp"

namespace lgdiff {

// Versioned little-endian container mapping tensor names to shapes and
// row-major double data. Carries the config hash of the run that wrote it
// so consumers can refuse mismatched combinations.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint64_t config_hash = 0;
  std::string config_json;  // full run configuration, for self-contained sampling
  std::vector<std::pair<std::string, Tensor>> tensors;

  void add(std::string name, Tensor t) { tensors.emplace_back(std::move(name), std::move(t)); }
  const Tensor* find(const std::string& name) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace lgdiff
