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

#ifndef TCL_CLI_ARTIFACTS_H_
#define TCL_CLI_ARTIFACTS_H_

// Output files. Every artifact starts with a provenance line carrying the
// format version, config hash and seed: a "# ..." comment for CSV and a
// {"header": ...} object for JSON Lines.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcl/learn.h"
#include "tcl/tokenspace.h"

namespace tcl::cli {

inline constexpr int kFormatVersion = 1;

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string command;
};

// 17 significant digits, '.' decimal, no locale.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Provenance& prov,
            const std::vector<std::string>& columns);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvWriter& cell(const char* s) { return cell(std::string(s)); }
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

nlohmann::json provenance_json(const Provenance& prov);

void write_samples(const std::filesystem::path& path, const Provenance& prov,
                   const std::vector<LabeledGrid>& grids);
std::vector<LabeledGrid> read_samples(const std::filesystem::path& path);

void write_loss_trace(const std::filesystem::path& path, const Provenance& prov,
                      const std::vector<TraceRow>& trace);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace tcl::cli

#endif  // TCL_CLI_ARTIFACTS_H_
