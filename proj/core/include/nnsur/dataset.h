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

#ifndef NNSUR_DATASET_H_
#define NNSUR_DATASET_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/network.h"

namespace nnsur {

enum class TaskKind { kClassification, kRegression };

// Samples are stored column-wise: inputs.col(s) is sample s.
struct Dataset {
  TaskKind kind = TaskKind::kClassification;
  int num_classes = 0;           // classification only
  Eigen::MatrixXd inputs;        // n_0 x samples
  std::vector<int> labels;       // classification
  std::vector<double> targets;   // regression
  Box box;

  int size() const { return static_cast<int>(inputs.cols()); }
  int input_size() const { return static_cast<int>(inputs.rows()); }

  // Throws StructuralError on label/box/shape violations.
  void Validate() const;

  // First `count` samples (or all, if fewer).
  Dataset Head(int count) const;
  // Samples [begin, begin + count), clipped to the available range.
  Dataset Slice(int begin, int count) const;

  friend bool operator==(const Dataset& a, const Dataset& b);
};

struct SyntheticBlobOptions {
  // Class centres are drawn uniformly from [0.5 - spread/2, 0.5 + spread/2].
  double center_spread = 0.6;
  double noise = 0.1;
};

// One Gaussian blob per class inside [0, 1]^n0, clipped to the box. Classes
// are balanced; the first `samples % classes` classes get one extra sample.
// Samples are interleaved by class (0, 1, ..., m-1, 0, 1, ...).
Dataset MakeSyntheticClassification(int input_size, int classes, int samples,
                                    uint64_t seed,
                                    const SyntheticBlobOptions& options = {});

class IdxFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads an MNIST-layout image/label pair. Pixels are scaled to [0, 1]. When
// `downscale` is set, images are area-averaged to downscale x downscale.
Dataset LoadIdxDataset(const std::string& images_path,
                       const std::string& labels_path, int max_samples,
                       std::optional<int> downscale = std::nullopt);

// Area-average resampling of a rows x cols image to out x out.
Eigen::VectorXd AreaDownscale(const Eigen::VectorXd& image, int rows, int cols,
                              int out);

// Writes the IDX pair. Pixels are clamped to [0, 1] and quantised to bytes.
void WriteIdxDataset(const Dataset& data, int rows, int cols,
                     const std::string& images_path,
                     const std::string& labels_path);

}  // namespace nnsur

#endif  // NNSUR_DATASET_H_
