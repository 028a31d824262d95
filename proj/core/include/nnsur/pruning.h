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

// Magnitude and random pruning, unstructured (individual weights) or
// structured (whole hidden neurons), with an optional iterative finetuning
// schedule.
//
// Target counts are always floor(rate * count) per layer. Biases are never
// pruned individually; in structured mode a dead neuron loses its incoming
// row, its bias and its outgoing column, and ApplyMask deletes it.

#ifndef NNSUR_PRUNING_H_
#define NNSUR_PRUNING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/dataset.h"
#include "nnsur/network.h"
#include "nnsur/train.h"

namespace nnsur {

enum class PruneMethod { kMagnitude, kRandom };
enum class Granularity { kUnstructured, kStructured };

std::string ToString(PruneMethod method);
std::string ToString(Granularity granularity);
PruneMethod ParsePruneMethod(const std::string& text);
Granularity ParseGranularity(const std::string& text);

struct FinetuneSchedule {
  int rounds = 5;
  int epochs_per_round = 5;
  double learning_rate = 0.2;
  int batch_size = 32;
};

struct PruningSpec {
  PruneMethod method = PruneMethod::kMagnitude;
  Granularity granularity = Granularity::kUnstructured;
  double rate = 0.0;
  std::optional<FinetuneSchedule> finetune;
  uint64_t seed = 0;

  // Throws StructuralError unless 0 <= rate < 1 and rounds >= 1.
  void Validate() const;
  // Short tag such as "mp-u-0.8-nf".
  std::string Label() const;
};

using BinaryMatrix = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Mask {
  Granularity granularity = Granularity::kUnstructured;
  std::vector<BinaryMatrix> weights;  // 1 keeps the weight
  // One vector per hidden layer, structured mode only. 1 = alive.
  std::vector<std::vector<uint8_t>> alive;

  int64_t masked_count(int layer) const;
  int dead_count(int hidden_layer) const;
  friend bool operator==(const Mask& a, const Mask& b);
};

// floor(rate * count), guarded against representation error such as
// 0.29 * 100 = 28.999999999999996.
int64_t PruneTarget(double rate, int64_t count);

Mask FullMask(const Network& net);

// Masks the floor(rate * n_l * n_{l-1}) smallest-magnitude weights of every
// layer; ties go to the lower row-major index. Positions already masked in
// `previous` stay masked and count towards the target.
Mask MagnitudeMask(const Network& net, double rate,
                   const Mask* previous = nullptr);

// Same counts as MagnitudeMask, chosen uniformly without replacement among
// surviving weights.
Mask RandomMask(const Network& net, double rate, uint64_t seed,
                const Mask* previous = nullptr);

// Score of neuron `row` given its incoming weight matrix. Lower scores die
// first.
using NeuronScore = std::function<double(const Eigen::MatrixXd& weights, int row)>;
double IncomingL1(const Eigen::MatrixXd& weights, int row);

// Kills floor(rate * n_l) neurons in every hidden layer. Output neurons are
// never killed.
Mask StructuredMask(const Network& net, double rate, PruneMethod method,
                    uint64_t seed, const Mask* previous = nullptr,
                    const NeuronScore& score = IncomingL1);

// Zeroes masked weights (and, in structured mode, dead neurons' biases)
// without changing any shape.
Network MaskedNetwork(const Network& net, const Mask& mask);

// MaskedNetwork, then in structured mode deletes dead neurons so dims
// shrink.
Network ApplyMask(const Network& net, const Mask& mask);

ParameterMask ToParameterMask(const Mask& mask);

// rate * k / rounds for k = 1..rounds; {rate} without finetuning.
std::vector<double> CumulativeRates(const PruningSpec& spec);

struct PruneResult {
  Network network;
  Mask mask;           // in the dense network's shape
  double finetune_seconds = 0.0;
  std::vector<Mask> round_masks;  // one per round
};

// Throws StructuralError if finetuning is requested without data.
PruneResult PruneDetailed(const Network& net, const PruningSpec& spec,
                          const Dataset* data);
Network Prune(const Network& net, const PruningSpec& spec, const Dataset* data);

}  // namespace nnsur

#endif  // NNSUR_PRUNING_H_
