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

// Experiment configuration, read from a TOML document:
//
//   study = "verification"          # or "maximization"
//   output_dir = "out"
//   seeds = [0, 1, 2]
//   time_limit = 60.0               # seconds per solve
//   workers = 1
//   eps_range = [4.5, 5.5]          # verification only
//
//   [network]
//   input_sizes = [36, 64]
//   depths = [2]
//   widths = [16, 32]
//   classes = 10                    # verification only
//
//   [[dataset]]                     # verification only; repeatable
//   name = "blobs"
//   source = "synthetic"            # or "idx" with images/labels paths
//   train_samples = 600
//   test_samples = 200
//   center_spread = 0.6
//   noise = 0.1
//
//   [training]
//   epochs = 5
//   learning_rate = 0.2
//   batch_size = 32
//
//   [pruning]
//   methods = ["mp"]                # mp, rp
//   granularities = ["unstructured"]
//   rates = [0.8]
//   finetune = [false]
//   rounds = 5
//   epochs_per_round = 5
//
//   [solver]
//   emphasis = "balanced"           # direct solves
//   surrogate_emphasis = "feasibility"  # default depends on the study
//   node_order = "depth-first-hybrid"
//   pool_size = 1000
//   gap_tolerance = 1e-6
//   warm_start = true
//
// Unknown keys are rejected so that typos do not silently fall back to
// defaults.

#ifndef NNSUR_CONFIG_H_
#define NNSUR_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnsur/branch_and_bound.h"
#include "nnsur/dataset.h"
#include "nnsur/pruning.h"
#include "nnsur/train.h"

namespace nnsur {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StudyKind { kVerification, kMaximization };

std::string ToString(StudyKind kind);
StudyKind ParseStudyKind(const std::string& text);

struct DatasetSource {
  std::string name = "synthetic";
  bool idx = false;
  std::string images;  // idx only
  std::string labels;  // idx only
  int train_samples = 600;
  int test_samples = 200;
  SyntheticBlobOptions blobs;
};

struct ExperimentConfig {
  StudyKind study = StudyKind::kVerification;
  std::string output_dir = "out";
  std::vector<uint64_t> seeds{0};
  double time_limit = 60.0;
  int workers = 1;
  double eps_lo = 4.5;
  double eps_hi = 5.5;

  std::vector<int> input_sizes{36};
  std::vector<int> depths{2};
  std::vector<int> widths{16};
  int classes = 10;

  std::vector<DatasetSource> datasets{DatasetSource{}};
  TrainOptions training;

  std::vector<PruneMethod> methods{PruneMethod::kMagnitude};
  std::vector<Granularity> granularities{Granularity::kUnstructured};
  std::vector<double> rates{0.8};
  std::vector<bool> finetune{false};
  FinetuneSchedule schedule;

  Emphasis direct_emphasis = Emphasis::kBalanced;
  // Unset means feasibility for maximization and the direct setting for
  // verification.
  std::optional<Emphasis> surrogate_emphasis;
  NodeOrder node_order = NodeOrder::kDepthFirstHybrid;
  int pool_size = 1000;
  double gap_tolerance = 1e-6;
  bool warm_start = true;

  // Throws ConfigError on empty grids or out-of-range values.
  void Validate() const;
  // Cartesian product methods x granularities x rates x finetune, in that
  // nesting order.
  std::vector<PruningSpec> PruningGrid() const;
  SolverConfig DirectSolver() const;
  SolverConfig SurrogateSolver() const;
};

// Throws ConfigError with the offending key or line.
ExperimentConfig ParseExperimentConfig(const std::string& text,
                                       const std::string& source = "config");
ExperimentConfig LoadExperimentConfig(const std::string& path);

}  // namespace nnsur

#endif  // NNSUR_CONFIG_H_
