// Copyright 2026 The tclab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tcl/numerics/weights_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "tcl/error.h"
#include "tcl/rng.h"

namespace tcl {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'L', 'W'};
// Guards against absurd allocations when reading corrupt files.
constexpr std::uint32_t kMaxNameLength = 4096;
constexpr std::uint32_t kMaxRank = 8;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("weights file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("weights file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_weights(std::ostream& out, std::span<const Parameter> params) {
  out.write(kMagic, 4);
  put_u32(out, kWeightsVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const Parameter& p : params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : p.value.data()) put_f64(out, v);
  }
  if (!out) throw IoError("failed writing weights");
}

std::vector<Parameter> read_weights(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a weights file (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kWeightsVersion) {
    throw IoError("unsupported weights format version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32(in);
  std::vector<Parameter> params;
  std::set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    Parameter p;
    const std::uint32_t len = get_u32(in);
    if (len > kMaxNameLength) throw IoError("weights file: parameter name too long");
    p.name.resize(len);
    if (!in.read(p.name.data(), len)) throw IoError("weights file truncated");
    if (!names.insert(p.name).second) {
      throw IoError("weights file: duplicate parameter '" + p.name + "'");
    }
    const std::uint32_t rank = get_u32(in);
    if (rank > kMaxRank) throw IoError("weights file: rank too large");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = get_u32(in);
    std::vector<double> data(shape_product(shape));
    for (double& v : data) v = get_f64(in);
    p.value = Tensor(std::move(shape), std::move(data));
    params.push_back(std::move(p));
  }
  return params;
}

void save_weights(const std::filesystem::path& path,
                  std::span<const Parameter> params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_weights(out, params);
}

std::vector<Parameter> load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_weights(in);
}

void assign_weights(std::span<Parameter> params,
                    const std::vector<Parameter>& loaded) {
  if (loaded.size() != params.size()) {
    throw IoError("weights file has " + std::to_string(loaded.size()) +
                  " parameters, model expects " + std::to_string(params.size()));
  }
  for (Parameter& p : params) {
    const Parameter* match = nullptr;
    for (const Parameter& l : loaded) {
      if (l.name == p.name) match = &l;
    }
    if (match == nullptr) throw IoError("weights file lacks parameter '" + p.name + "'");
    if (!match->value.same_shape(p.value)) {
      throw IoError("parameter '" + p.name + "' has shape " +
                    match->value.shape_string() + ", model expects " +
                    p.value.shape_string());
    }
    p.value = match->value;
  }
}

std::uint64_t checksum(std::span<const Parameter> params) {
  std::uint64_t h = fnv1a64("");
  for (const Parameter& p : params) {
    h = fnv1a64(p.name, h);
    h = fnv1a64(p.value.shape_string(), h);
    const auto bytes = std::as_bytes(p.value.data());
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                 bytes.size()),
                h);
  }
  return h;
}

}  // namespace tcl
