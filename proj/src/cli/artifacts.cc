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

#include "tcl/cli/artifacts.h"

#include <charconv>
#include <cmath>
#include <system_error>

#include "tcl/error.h"

namespace tcl::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

nlohmann::json provenance_json(const Provenance& prov) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed;
  j["command"] = prov.command;
  return j;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const Provenance& prov,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), columns_(columns.size()) {
  if (!out_) throw IoError("cannot write " + path.string());
  out_ << "# format_version=" << kFormatVersion << " config_hash=" << prov.config_hash
       << " seed=" << prov.seed << " command=" << prov.command << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (filled_ == columns_) throw DomainError("csv: too many cells in row of " + path_.string());
  if (filled_++) out_ << ",";
  if (s.find_first_of(",\"\n") != std::string::npos) {
    out_ << '"';
    for (char ch : s) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    out_ << '"';
  } else {
    out_ << s;
  }
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(std::int64_t v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw DomainError("csv: short row in " + path_.string());
  out_ << "\n";
  filled_ = 0;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
  out_.close();
}

void write_samples(const std::filesystem::path& path, const Provenance& prov,
                   const std::vector<LabeledGrid>& grids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string header = nlohmann::json{{"header", provenance_json(prov)}}.dump();
  write_grids_jsonl(out, grids, header);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<LabeledGrid> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open samples " + path.string());
  return read_grids_jsonl(in);
}

void write_loss_trace(const std::filesystem::path& path, const Provenance& prov,
                      const std::vector<TraceRow>& trace) {
  CsvWriter csv(path, prov, {"step", "split", "metric", "value"});
  for (const TraceRow& r : trace) {
    csv.cell(r.step).cell(r.split).cell(r.metric).cell(r.value).end_row();
  }
  csv.close();
}

}  // namespace tcl::cli
