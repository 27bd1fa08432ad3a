//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "lgdiff/errors.hpp"

namespace lgdiff {

namespace {
constexpr char kMagic[4] = {'L', 'G', 'D', 'C'};

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }
}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInputError("checkpoint: cannot open '" + path + "' for writing");
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u64(os, config_hash);
  put_u64(os, config_json.size());
  os.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));
  put_u64(os, tensors.size());
  for (const auto& [name, t] : tensors) {
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<std::uint32_t>(t.ndim()));
    for (int i = 0; i < t.ndim(); ++i) put_u64(os, static_cast<std::uint64_t>(t.dim(i)));
    for (std::int64_t i = 0; i < t.numel(); ++i) put_f64(os, t[i]);
  }
  if (!os) throw InvalidInputError("checkpoint: write to '" + path + "' failed");
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInputError("checkpoint: cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw InvalidInputError("checkpoint: '" + path + "' is not a checkpoint file");
  const std::uint32_t version = get_u32(is);
  if (version != kVersion)
    throw InvalidInputError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ck;
  ck.config_hash = get_u64(is);
  const std::uint64_t json_len = get_u64(is);
  ck.config_json.resize(json_len);
  is.read(ck.config_json.data(), static_cast<std::streamsize>(json_len));
  const std::uint64_t count = get_u64(is);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint32_t name_len = get_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const std::uint32_t ndim = get_u32(is);
    std::vector<int> shape(ndim);
    for (std::uint32_t i = 0; i < ndim; ++i) shape[i] = static_cast<int>(get_u64(is));
    Tensor t(shape);
    for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = get_f64(is);
    if (!is) throw InvalidInputError("checkpoint: truncated file '" + path + "'");
    ck.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ck;
}

}  // namespace lgdiff
