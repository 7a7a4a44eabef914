/*
 * Copyright 2026 The Dendrite Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace dwb {

/// Shortest round-trip text for a double ("0.1", "1e-07", "nan", "inf").
/// Output is independent of locale and stream state, which keeps CSV
/// artifacts byte-identical across reruns.
std::string format_real(double value);

/// One CSV cell. Constructed implicitly from the types experiments emit.
class CsvField {
public:
  CsvField(double v) : text_(format_real(v)) {}
  CsvField(int v) : text_(std::to_string(v)) {}
  CsvField(long v) : text_(std::to_string(v)) {}
  CsvField(long long v) : text_(std::to_string(v)) {}
  CsvField(unsigned v) : text_(std::to_string(v)) {}
  CsvField(unsigned long v) : text_(std::to_string(v)) {}
  CsvField(unsigned long long v) : text_(std::to_string(v)) {}
  CsvField(bool v) : text_(v ? "true" : "false") {}
  CsvField(std::string v) : text_(std::move(v)) {}
  CsvField(const char* v) : text_(v) {}
  CsvField(std::string_view v) : text_(v) {}

  const std::string& text() const noexcept { return text_; }

private:
  std::string text_;
};

/// In-memory CSV table with a fixed header. Fields containing commas,
/// quotes or newlines are quoted per RFC 4180.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<CsvField> row);
  void add_row(std::initializer_list<CsvField> row) { add_row(std::vector<CsvField>(row)); }

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::string& cell(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

  std::string str() const;
  /// Writes the table; throws IoError when the path cannot be opened.
  void write(const std::filesystem::path& path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `text` verbatim; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// FNV-1a 64-bit digest, used for config hashes and artifact checksums.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

} // namespace dwb
