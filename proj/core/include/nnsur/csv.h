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

// RFC 4180 CSV: comma separated, CRLF-free output, fields quoted only when
// they contain a comma, a double quote or a line break.

#ifndef NNSUR_CSV_H_
#define NNSUR_CSV_H_

#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnsur {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using CsvRow = std::vector<std::string>;

std::string CsvEscape(const std::string& field);
void WriteCsvRow(std::ostream& out, const CsvRow& row);

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  // Column index by header name; throws CsvError when absent.
  int Column(const std::string& name) const;
  const std::string& Get(size_t row, const std::string& name) const;
};

CsvTable ReadCsv(std::istream& in);
CsvTable ReadCsvFile(const std::string& path);
void WriteCsvFile(const std::string& path, const CsvTable& table);

// Shortest text that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(const std::string& text);

}  // namespace nnsur

#endif  // NNSUR_CSV_H_
