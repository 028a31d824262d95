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

#include "nnsur/summary.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nnsur {

const std::vector<std::string>& GroupDimensions() {
  static const std::vector<std::string> kDims{"dataset", "n0",          "depth", "width",
                                              "method",  "granularity", "rate",  "finetune"};
  return kDims;
}

std::vector<Comparison> ToComparisons(const std::vector<RunRecord>& records) {
  std::vector<Comparison> out;
  for (const RunRecord& r : records) {
    Comparison c;
    c.instance_id = r.instance_id;
    c.keys = {{"dataset", r.dataset},
              {"n0", std::to_string(r.n0)},
              {"depth", std::to_string(r.depth)},
              {"width", std::to_string(r.width)},
              {"method", r.method},
              {"granularity", r.granularity},
              {"rate", FormatDouble(r.rate)},
              {"finetune", r.finetune ? "true" : "false"}};
    c.finetune_time = r.finetune_time;
    c.direct_none = std::isnan(r.direct.objective);
    c.surrogate_none = std::isnan(r.surrogate.objective);
    if (r.study == StudyKind::kVerification) {
      c.metric = Metric::kTime;
      c.direct = c.direct_none ? kInfinity : r.direct.time;
      c.surrogate = c.surrogate_none ? kInfinity : r.surrogate.time;
    } else {
      c.metric = Metric::kValue;
      c.direct = c.direct_none ? -kInfinity : r.direct.objective;
      c.surrogate = c.surrogate_none ? -kInfinity : r.surrogate.objective;
    }
    out.push_back(std::move(c));
  }
  return out;
}

Verdict Compare(const Comparison& c, bool include_finetune) {
  if (c.direct_none && c.surrogate_none) return Verdict::kTie;
  if (c.direct_none) return Verdict::kSurrogate;
  if (c.surrogate_none) return Verdict::kDirect;
  double surrogate = c.surrogate;
  if (include_finetune && c.metric == Metric::kTime) surrogate += c.finetune_time;
  if (std::abs(surrogate - c.direct) <= kTieTolerance) return Verdict::kTie;
  const bool surrogate_better =
      c.metric == Metric::kTime ? surrogate < c.direct : surrogate > c.direct;
  return surrogate_better ? Verdict::kSurrogate : Verdict::kDirect;
}

namespace {

double Median(std::vector<double> v) {
  if (v.empty()) return kNotAvailable;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  const double a = v[n / 2 - 1];
  const double b = v[n / 2];
  if (a == b) return a;
  return 0.5 * (a + b);
}

std::optional<double> Percent(int wins, int losses) {
  if (wins + losses == 0) return std::nullopt;
  return 100.0 * wins / (wins + losses);
}

}  // namespace

std::vector<SummaryRow> Summarize(const std::vector<Comparison>& comparisons,
                                  const std::vector<std::string>& group_by) {
  for (const std::string& dim : group_by) {
    const auto& dims = GroupDimensions();
    if (std::find(dims.begin(), dims.end(), dim) == dims.end()) {
      throw std::invalid_argument(fmt::format("unknown grouping dimension '{}'", dim));
    }
  }
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> direct_values;
  std::vector<std::vector<double>> surrogate_values;
  std::map<std::vector<std::string>, size_t> index;
  for (const Comparison& c : comparisons) {
    std::vector<std::string> key;
    for (const std::string& dim : group_by) {
      const auto it = c.keys.find(dim);
      key.push_back(it == c.keys.end() ? "" : it->second);
    }
    auto [it, inserted] = index.emplace(key, rows.size());
    if (inserted) {
      rows.push_back({});
      rows.back().key = key;
      direct_values.emplace_back();
      surrogate_values.emplace_back();
    }
    SummaryRow& row = rows[it->second];
    ++row.instances;
    switch (Compare(c, false)) {
      case Verdict::kSurrogate: ++row.wins; break;
      case Verdict::kDirect: ++row.losses; break;
      case Verdict::kTie: ++row.ties; break;
    }
    switch (Compare(c, true)) {
      case Verdict::kSurrogate: ++row.wins_with_finetune; break;
      case Verdict::kDirect: ++row.losses_with_finetune; break;
      case Verdict::kTie: ++row.ties_with_finetune; break;
    }
    direct_values[it->second].push_back(c.direct);
    surrogate_values[it->second].push_back(c.surrogate);
  }
  for (size_t g = 0; g < rows.size(); ++g) {
    SummaryRow& row = rows[g];
    row.percent = Percent(row.wins, row.losses);
    row.percent_with_finetune = Percent(row.wins_with_finetune, row.losses_with_finetune);
    row.median_direct = Median(direct_values[g]);
    row.median_surrogate = Median(surrogate_values[g]);
  }
  return rows;
}

CsvTable SummaryTable(const std::vector<SummaryRow>& rows,
                      const std::vector<std::string>& group_by) {
  CsvTable t;
  t.header = group_by;
  for (const char* col :
       {"instances", "wins", "losses", "ties", "percent", "wins_with_finetune",
        "losses_with_finetune", "ties_with_finetune", "percent_with_finetune",
        "median_direct", "median_surrogate"}) {
    t.header.push_back(col);
  }
  const auto pct = [](const std::optional<double>& p) {
    return p ? fmt::format("{:.1f}", *p) : std::string();
  };
  for (const SummaryRow& r : rows) {
    CsvRow row = r.key;
    row.push_back(std::to_string(r.instances));
    row.push_back(std::to_string(r.wins));
    row.push_back(std::to_string(r.losses));
    row.push_back(std::to_string(r.ties));
    row.push_back(pct(r.percent));
    row.push_back(std::to_string(r.wins_with_finetune));
    row.push_back(std::to_string(r.losses_with_finetune));
    row.push_back(std::to_string(r.ties_with_finetune));
    row.push_back(pct(r.percent_with_finetune));
    row.push_back(FormatDouble(r.median_direct));
    row.push_back(FormatDouble(r.median_surrogate));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable ScatterTable(const std::vector<Comparison>& comparisons) {
  CsvTable t;
  t.header = {"instance_id"};
  for (const std::string& dim : GroupDimensions()) t.header.push_back(dim);
  for (const char* col : {"metric", "direct_metric", "surrogate_metric", "finetune_time",
                          "direct_none_found", "surrogate_none_found", "flag"}) {
    t.header.push_back(col);
  }
  for (const Comparison& c : comparisons) {
    CsvRow row{std::to_string(c.instance_id)};
    for (const std::string& dim : GroupDimensions()) {
      const auto it = c.keys.find(dim);
      row.push_back(it == c.keys.end() ? "" : it->second);
    }
    row.push_back(c.metric == Metric::kTime ? "time" : "value");
    row.push_back(FormatDouble(c.direct));
    row.push_back(FormatDouble(c.surrogate));
    row.push_back(FormatDouble(c.finetune_time));
    row.push_back(c.direct_none ? "true" : "false");
    row.push_back(c.surrogate_none ? "true" : "false");
    std::string flag;
    if (c.direct_none && c.surrogate_none) {
      flag = "both-timeout";
    } else if (c.direct_none) {
      flag = "direct-timeout";
    } else if (c.surrogate_none) {
      flag = "surrogate-timeout";
    }
    row.push_back(flag);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void EmitScatter(const std::vector<RunRecord>& records, const std::string& path) {
  WriteCsvFile(path, ScatterTable(ToComparisons(records)));
}

std::vector<Comparison> ReadComparisons(const CsvTable& table) {
  const bool scatter = std::find(table.header.begin(), table.header.end(),
                                 "direct_metric") != table.header.end();
  if (!scatter) return ToComparisons(ReadRecords(table));
  std::vector<Comparison> out;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    Comparison c;
    c.instance_id = std::stoi(table.Get(i, "instance_id"));
    for (const std::string& dim : GroupDimensions()) c.keys[dim] = table.Get(i, dim);
    const std::string& metric = table.Get(i, "metric");
    if (metric != "time" && metric != "value") {
      throw CsvError(fmt::format("row {}: unknown metric '{}'", i + 2, metric));
    }
    c.metric = metric == "time" ? Metric::kTime : Metric::kValue;
    c.direct = ParseDouble(table.Get(i, "direct_metric"));
    c.surrogate = ParseDouble(table.Get(i, "surrogate_metric"));
    c.finetune_time = ParseDouble(table.Get(i, "finetune_time"));
    c.direct_none = table.Get(i, "direct_none_found") == "true";
    c.surrogate_none = table.Get(i, "surrogate_none_found") == "true";
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace nnsur
