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

#ifndef TCL_NUMERICS_WEIGHTS_IO_H_
#define TCL_NUMERICS_WEIGHTS_IO_H_

// Weights file layout, all integers little-endian u32:
//   "TCLW" | version | parameter count
//   per parameter: name length | UTF-8 name | rank | dims... | f64 data (LE)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tcl/numerics/autograd.h"

namespace tcl {

inline constexpr std::uint32_t kWeightsVersion = 1;

void write_weights(std::ostream& out, std::span<const Parameter> params);
std::vector<Parameter> read_weights(std::istream& in);

void save_weights(const std::filesystem::path& path,
                  std::span<const Parameter> params);
std::vector<Parameter> load_weights(const std::filesystem::path& path);

// Copies values from `loaded` into `params` by name; every parameter must be
// present with the same shape. Throws IoError otherwise.
void assign_weights(std::span<Parameter> params,
                    const std::vector<Parameter>& loaded);

// FNV-1a over names, shapes and raw value bytes.
std::uint64_t checksum(std::span<const Parameter> params);

}  // namespace tcl

#endif  // TCL_NUMERICS_WEIGHTS_IO_H_
