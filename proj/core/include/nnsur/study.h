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

// Experiment orchestration: one instance per (dataset, input size, depth,
// width, seed); each instance runs one direct solve and one surrogate solve
// per pruning configuration.

#ifndef NNSUR_STUDY_H_
#define NNSUR_STUDY_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nnsur/config.h"
#include "nnsur/csv.h"
#include "nnsur/surrogate.h"

namespace nnsur {

struct InstanceSpec {
  int id = 0;
  std::string dataset;  // empty for maximization
  int dataset_index = 0;
  int n0 = 0;
  int depth = 0;
  int width = 0;
  uint64_t seed = 0;
};

// Nesting order: dataset, input size, depth, width, seed.
std::vector<InstanceSpec> EnumerateInstances(const ExperimentConfig& config);

inline constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

struct SolveSummary {
  std::string status;   // solver status
  std::string outcome;  // surrogate outcome
  // Dense margin of the adversarial input, or dense best value. NaN when the
  // solve returned no input.
  double objective = kNotAvailable;
  int64_t incumbents = 0;
  int64_t nodes = 0;
  int binaries = 0;
  double time = 0.0;
};

SolveSummary Summarize(const SurrogateResult& result);

// One row per instance and pruning configuration.
struct RunRecord {
  int instance_id = 0;
  StudyKind study = StudyKind::kVerification;
  std::string dataset;
  int n0 = 0;
  int depth = 0;
  int width = 0;
  uint64_t seed = 0;
  int sample = -1;
  double eps = kNotAvailable;
  int j = -1;
  int j_prime = -1;
  std::string method;
  std::string granularity;
  double rate = 0.0;
  bool finetune = false;
  std::string config;  // pruning label
  double dense_accuracy = kNotAvailable;
  double pruned_accuracy = kNotAvailable;
  SolveSummary direct;
  SolveSummary surrogate;
  double finetune_time = 0.0;
};

// One row per solve: the direct solve plus one per pruning configuration.
struct RunRow {
  int instance_id = 0;
  std::string config;  // "direct" or a pruning label
  SolveSummary solve;
  double finetune_time = 0.0;
};

struct InstanceNote {
  int instance_id = 0;
  std::string message;
};

struct StudyResult {
  std::vector<InstanceSpec> instances;
  std::vector<RunRecord> records;
  std::vector<RunRow> runs;
  std::vector<InstanceNote> skipped;
  std::vector<InstanceNote> failures;
};

// One finished solve, as seen by StudyOptions::on_solve.
struct SolveEvent {
  const InstanceSpec& spec;
  const std::string& config;  // "direct" or a pruning label
  const Network& dense;
  const VerificationInstance* instance;  // null for maximization
  const SurrogateResult& result;
};

struct StudyOptions {
  std::ostream* log = nullptr;
  std::optional<int> workers;  // overrides the config
  // Called after every solve. Calls are serialised across workers.
  std::function<void(const SolveEvent&)> on_solve;
};

StudyResult RunStudy(const ExperimentConfig& config, const StudyOptions& options = {});
StudyResult RunVerificationStudy(const ExperimentConfig& config,
                                 const StudyOptions& options = {});
StudyResult RunMaximizationStudy(const ExperimentConfig& config,
                                 const StudyOptions& options = {});

CsvTable RecordsTable(const std::vector<RunRecord>& records);
CsvTable RunsTable(const std::vector<RunRow>& runs);
std::vector<RunRecord> ReadRecords(const CsvTable& table);

// Writes records.csv, runs.csv, skipped.csv and settings.csv under `dir`.
void WriteStudyOutputs(const ExperimentConfig& config, const StudyResult& result,
                       const std::string& dir);

// Instance data shared with the command-line tool.
Dataset StudyDataset(const DatasetSource& source, int n0, int classes, uint64_t seed,
                     int dataset_index);
double DrawEps(const ExperimentConfig& config, const DatasetSource& source, int n0,
               uint64_t seed);

}  // namespace nnsur

#endif  // NNSUR_STUDY_H_
