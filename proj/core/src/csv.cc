// Copyright 2026 The nnsur Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nnsur/csv.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace nnsur {

std::string CsvEscape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void WriteCsvRow(std::ostream& out, const CsvRow& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << CsvEscape(row[i]);
  }
  out << '\n';
}

int CsvTable::Column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw CsvError(fmt::format("missing column '{}'", name));
}

const std::string& CsvTable::Get(size_t row, const std::string& name) const {
  const int col = Column(name);
  if (col >= static_cast<int>(rows.at(row).size())) {
    throw CsvError(fmt::format("row {} has no column '{}'", row + 2, name));
  }
  return rows[row][col];
}

CsvTable ReadCsv(std::istream& in) {
  std::vector<CsvRow> all;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int line = 1;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw CsvError(fmt::format("line {}: stray quote", line));
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        all.push_back(std::move(row));
        row.clear();
        field_started = false;
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw CsvError(fmt::format("line {}: unterminated quoted field", line));
  if (field_started || !field.empty()) {
    row.push_back(std::move(field));
    all.push_back(std::move(row));
  }
  CsvTable table;
  if (all.empty()) return table;
  table.header = std::move(all.front());
  table.rows.assign(std::make_move_iterator(all.begin() + 1),
                    std::make_move_iterator(all.end()));
  for (size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw CsvError(fmt::format("record {}: {} fields, header has {}", r + 2,
                                 table.rows[r].size(), table.header.size()));
    }
  }
  return table;
}

CsvTable ReadCsvFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(fmt::format("{}: cannot open", path));
  return ReadCsv(in);
}

void WriteCsvFile(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError(fmt::format("{}: cannot open for writing", path));
  WriteCsvRow(out, table.header);
  for (const CsvRow& row : table.rows) WriteCsvRow(out, row);
}

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

double ParseDouble(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  const bool overflow = errno == ERANGE && std::isinf(v);
  if (text.empty() || end != text.c_str() + text.size() || overflow) {
    throw CsvError(fmt::format("'{}' is not a number", text));
  }
  return v;
}

}  // namespace nnsur
