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

#include "dwb/csv.hpp"

#include "dwb/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dwb {

std::string format_real(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvField> row) {
  if (row.size() != header_.size()) {
    throw ShapeError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                     std::to_string(header_.size()));
  }
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (auto& f : row) {
    cells.push_back(f.text());
  }
  rows_.push_back(std::move(cells));
}

namespace {

void append_cell(std::string& out, const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) {
    out += cell;
    return;
  }
  out += '"';
  for (char c : cell) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
}

void append_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    append_cell(out, cells[i]);
  }
  out += '\n';
}

} // namespace

std::string CsvTable::str() const {
  std::string out;
  append_line(out, header_);
  for (const auto& r : rows_) {
    append_line(out, r);
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text_file(path, str()); }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) {
    throw IoError("failed writing " + path.string());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return s;
}

} // namespace dwb
