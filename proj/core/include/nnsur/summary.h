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

// Direct-versus-surrogate comparisons, win percentages and scatter data.

#ifndef NNSUR_SUMMARY_H_
#define NNSUR_SUMMARY_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnsur/csv.h"
#include "nnsur/study.h"

namespace nnsur {

// Differences at or below this are ties.
inline constexpr double kTieTolerance = 1e-9;

enum class Metric { kTime, kValue };

// One direct/surrogate pair. Time comparisons use the time to find an
// adversarial input (+inf when none was found); value comparisons use the
// dense best value (-inf when none was found).
struct Comparison {
  int instance_id = 0;
  std::map<std::string, std::string> keys;  // grouping dimensions
  Metric metric = Metric::kTime;
  double direct = 0.0;
  double surrogate = 0.0;
  double finetune_time = 0.0;
  bool direct_none = false;
  bool surrogate_none = false;
};

enum class Verdict { kSurrogate, kDirect, kTie };

// Valid names for group_by.
const std::vector<std::string>& GroupDimensions();

std::vector<Comparison> ToComparisons(const std::vector<RunRecord>& records);
Verdict Compare(const Comparison& c, bool include_finetune);

struct SummaryRow {
  std::vector<std::string> key;  // one value per group_by dimension
  int instances = 0;
  int wins = 0;  // surrogate better
  int losses = 0;
  int ties = 0;
  std::optional<double> percent;  // wins / (wins + losses); empty if all tie
  int wins_with_finetune = 0;
  int losses_with_finetune = 0;
  int ties_with_finetune = 0;
  std::optional<double> percent_with_finetune;
  double median_direct = 0.0;
  double median_surrogate = 0.0;
};

// Groups appear in order of first occurrence. Throws std::invalid_argument
// on an unknown dimension.
std::vector<SummaryRow> Summarize(const std::vector<Comparison>& comparisons,
                                  const std::vector<std::string>& group_by);
CsvTable SummaryTable(const std::vector<SummaryRow>& rows,
                      const std::vector<std::string>& group_by);

CsvTable ScatterTable(const std::vector<Comparison>& comparisons);
void EmitScatter(const std::vector<RunRecord>& records, const std::string& path);
// Accepts a scatter table or a records table.
std::vector<Comparison> ReadComparisons(const CsvTable& table);

}  // namespace nnsur

#endif  // NNSUR_SUMMARY_H_
