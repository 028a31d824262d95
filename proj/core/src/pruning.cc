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

#include "nnsur/pruning.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace nnsur {

std::string ToString(PruneMethod method) {
  return method == PruneMethod::kMagnitude ? "magnitude" : "random";
}

std::string ToString(Granularity granularity) {
  return granularity == Granularity::kUnstructured ? "unstructured"
                                                   : "structured";
}

PruneMethod ParsePruneMethod(const std::string& text) {
  if (text == "magnitude" || text == "mp") return PruneMethod::kMagnitude;
  if (text == "random" || text == "rp") return PruneMethod::kRandom;
  throw StructuralError(fmt::format("unknown pruning method '{}'", text));
}

Granularity ParseGranularity(const std::string& text) {
  if (text == "unstructured") return Granularity::kUnstructured;
  if (text == "structured") return Granularity::kStructured;
  throw StructuralError(fmt::format("unknown pruning granularity '{}'", text));
}

void PruningSpec::Validate() const {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw StructuralError(fmt::format("pruning rate {} outside [0, 1)", rate));
  }
  if (finetune && (finetune->rounds < 1 || finetune->epochs_per_round < 1)) {
    throw StructuralError("finetuning needs at least one round and one epoch");
  }
}

std::string PruningSpec::Label() const {
  return fmt::format("{}-{}-{}-{}", method == PruneMethod::kMagnitude ? "mp" : "rp",
                     granularity == Granularity::kUnstructured ? "u" : "s", rate,
                     finetune ? "f" : "nf");
}

int64_t Mask::masked_count(int layer) const {
  return (weights[layer].array() == 0).count();
}

int Mask::dead_count(int hidden_layer) const {
  if (alive.empty()) return 0;
  const auto& a = alive[hidden_layer];
  return static_cast<int>(std::count(a.begin(), a.end(), 0));
}

bool operator==(const Mask& a, const Mask& b) {
  if (a.granularity != b.granularity || a.alive != b.alive ||
      a.weights.size() != b.weights.size()) {
    return false;
  }
  for (size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l] != b.weights[l]) return false;
  }
  return true;
}

int64_t PruneTarget(double rate, int64_t count) {
  return static_cast<int64_t>(std::floor(rate * static_cast<double>(count) + 1e-9));
}

Mask FullMask(const Network& net) {
  Mask mask;
  for (const auto& w : net.weights) {
    mask.weights.push_back(BinaryMatrix::Ones(w.rows(), w.cols()));
  }
  return mask;
}

namespace {

void CheckRate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw StructuralError(fmt::format("pruning rate {} outside [0, 1)", rate));
  }
}

Mask StartFrom(const Network& net, const Mask* previous, Granularity granularity) {
  Mask mask = previous ? *previous : FullMask(net);
  if (mask.weights.size() != net.weights.size()) {
    throw StructuralError("mask does not match the network's layers");
  }
  for (size_t l = 0; l < net.weights.size(); ++l) {
    if (mask.weights[l].rows() != net.weights[l].rows() ||
        mask.weights[l].cols() != net.weights[l].cols()) {
      throw StructuralError(fmt::format("mask layer {} has the wrong shape", l));
    }
  }
  mask.granularity = granularity;
  if (granularity == Granularity::kStructured && mask.alive.empty()) {
    for (int l = 0; l + 1 < net.layer_count(); ++l) {
      mask.alive.emplace_back(net.dims[l + 1], uint8_t{1});
    }
  }
  return mask;
}

// Surviving flat (row-major) indices of one layer, in index order.
std::vector<int64_t> Survivors(const BinaryMatrix& keep) {
  std::vector<int64_t> out;
  for (int i = 0; i < keep.rows(); ++i) {
    for (int j = 0; j < keep.cols(); ++j) {
      if (keep(i, j)) out.push_back(static_cast<int64_t>(i) * keep.cols() + j);
    }
  }
  return out;
}

void Kill(BinaryMatrix& keep, int64_t flat) {
  keep(static_cast<int>(flat / keep.cols()), static_cast<int>(flat % keep.cols())) = 0;
}

void KillNeuron(Mask& mask, int hidden_layer, int neuron) {
  mask.alive[hidden_layer][neuron] = 0;
  mask.weights[hidden_layer].row(neuron).setZero();
  mask.weights[hidden_layer + 1].col(neuron).setZero();
}

}  // namespace

Mask MagnitudeMask(const Network& net, double rate, const Mask* previous) {
  CheckRate(rate);
  Mask mask = StartFrom(net, previous, Granularity::kUnstructured);
  for (int l = 0; l < net.layer_count(); ++l) {
    const Eigen::MatrixXd& w = net.weights[l];
    BinaryMatrix& keep = mask.weights[l];
    const int64_t extra = PruneTarget(rate, w.size()) - mask.masked_count(l);
    if (extra <= 0) continue;
    std::vector<int64_t> alive = Survivors(keep);
    const auto magnitude = [&](int64_t flat) {
      return std::abs(w(static_cast<int>(flat / w.cols()),
                        static_cast<int>(flat % w.cols())));
    };
    std::stable_sort(alive.begin(), alive.end(), [&](int64_t a, int64_t b) {
      return magnitude(a) < magnitude(b);
    });
    for (int64_t k = 0; k < extra; ++k) Kill(keep, alive[k]);
  }
  return mask;
}

Mask RandomMask(const Network& net, double rate, uint64_t seed,
                const Mask* previous) {
  CheckRate(rate);
  Mask mask = StartFrom(net, previous, Granularity::kUnstructured);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < net.layer_count(); ++l) {
    BinaryMatrix& keep = mask.weights[l];
    const int64_t extra = PruneTarget(rate, keep.size()) - mask.masked_count(l);
    if (extra <= 0) continue;
    std::vector<int64_t> alive = Survivors(keep);
    // Partial Fisher-Yates: the first `extra` entries become a uniform sample.
    for (int64_t k = 0; k < extra; ++k) {
      std::uniform_int_distribution<int64_t> pick(k, static_cast<int64_t>(alive.size()) - 1);
      std::swap(alive[k], alive[pick(rng)]);
      Kill(keep, alive[k]);
    }
  }
  return mask;
}

double IncomingL1(const Eigen::MatrixXd& weights, int row) {
  return weights.row(row).lpNorm<1>();
}

Mask StructuredMask(const Network& net, double rate, PruneMethod method,
                    uint64_t seed, const Mask* previous,
                    const NeuronScore& score) {
  CheckRate(rate);
  Mask mask = StartFrom(net, previous, Granularity::kStructured);
  std::mt19937_64 rng(seed);
  for (int l = 0; l + 1 < net.layer_count(); ++l) {
    const int width = net.dims[l + 1];
    const int64_t extra = PruneTarget(rate, width) - mask.dead_count(l);
    if (extra <= 0) continue;
    std::vector<int> alive;
    for (int i = 0; i < width; ++i) {
      if (mask.alive[l][i]) alive.push_back(i);
    }
    if (method == PruneMethod::kMagnitude) {
      std::vector<double> scores(width);
      for (int i : alive) scores[i] = score(net.weights[l], i);
      std::stable_sort(alive.begin(), alive.end(),
                       [&](int a, int b) { return scores[a] < scores[b]; });
    } else {
      for (int64_t k = 0; k < extra; ++k) {
        std::uniform_int_distribution<int64_t> pick(k, static_cast<int64_t>(alive.size()) - 1);
        std::swap(alive[k], alive[pick(rng)]);
      }
    }
    for (int64_t k = 0; k < extra; ++k) KillNeuron(mask, l, alive[k]);
  }
  return mask;
}

Network MaskedNetwork(const Network& net, const Mask& mask) {
  Network out = net;
  for (int l = 0; l < out.layer_count(); ++l) {
    out.weights[l] = (mask.weights[l].array() != 0).select(out.weights[l], 0.0);
  }
  for (size_t l = 0; l < mask.alive.size(); ++l) {
    for (size_t i = 0; i < mask.alive[l].size(); ++i) {
      if (!mask.alive[l][i]) out.biases[l][i] = 0.0;
    }
  }
  return out;
}

Network ApplyMask(const Network& net, const Mask& mask) {
  Network masked = MaskedNetwork(net, mask);
  if (mask.granularity != Granularity::kStructured || mask.alive.empty()) {
    return masked;
  }
  Network out;
  out.domain = masked.domain;
  out.dims.push_back(masked.dims[0]);
  // kept[l] lists surviving indices of layer l's inputs (layer 0: all).
  std::vector<int> kept_in(masked.dims[0]);
  std::iota(kept_in.begin(), kept_in.end(), 0);
  for (int l = 0; l < masked.layer_count(); ++l) {
    std::vector<int> kept_out;
    if (masked.is_output_layer(l)) {
      kept_out.resize(masked.dims[l + 1]);
      std::iota(kept_out.begin(), kept_out.end(), 0);
    } else {
      for (int i = 0; i < masked.dims[l + 1]; ++i) {
        if (mask.alive[l][i]) kept_out.push_back(i);
      }
    }
    Eigen::MatrixXd w(kept_out.size(), kept_in.size());
    Eigen::VectorXd b(kept_out.size());
    for (size_t r = 0; r < kept_out.size(); ++r) {
      b[r] = masked.biases[l][kept_out[r]];
      for (size_t c = 0; c < kept_in.size(); ++c) {
        w(r, c) = masked.weights[l](kept_out[r], kept_in[c]);
      }
    }
    if (kept_out.empty()) {
      throw StructuralError(fmt::format("structured mask empties layer {}", l));
    }
    out.dims.push_back(static_cast<int>(kept_out.size()));
    out.weights.push_back(std::move(w));
    out.biases.push_back(std::move(b));
    kept_in = std::move(kept_out);
  }
  out.Validate();
  return out;
}

ParameterMask ToParameterMask(const Mask& mask) {
  ParameterMask out;
  for (size_t l = 0; l < mask.weights.size(); ++l) {
    out.weights.push_back(mask.weights[l].cast<double>());
    out.biases.push_back(Eigen::VectorXd::Ones(mask.weights[l].rows()));
  }
  for (size_t l = 0; l < mask.alive.size(); ++l) {
    for (size_t i = 0; i < mask.alive[l].size(); ++i) {
      if (!mask.alive[l][i]) out.biases[l][i] = 0.0;
    }
  }
  return out;
}

std::vector<double> CumulativeRates(const PruningSpec& spec) {
  if (!spec.finetune) return {spec.rate};
  std::vector<double> rates;
  const int rounds = spec.finetune->rounds;
  for (int k = 1; k <= rounds; ++k) rates.push_back(spec.rate * k / rounds);
  return rates;
}

namespace {

Mask NextMask(const Network& net, const PruningSpec& spec, double rate,
              const Mask* previous, uint64_t seed) {
  if (spec.granularity == Granularity::kStructured) {
    return StructuredMask(net, rate, spec.method, seed, previous);
  }
  if (spec.method == PruneMethod::kMagnitude) {
    return MagnitudeMask(net, rate, previous);
  }
  return RandomMask(net, rate, seed, previous);
}

}  // namespace

PruneResult PruneDetailed(const Network& net, const PruningSpec& spec,
                          const Dataset* data) {
  spec.Validate();
  if (spec.finetune && data == nullptr) {
    throw StructuralError("finetuning requested without a dataset");
  }
  PruneResult result;
  if (!spec.finetune) {
    result.mask = NextMask(net, spec, spec.rate, nullptr, spec.seed);
    result.round_masks.push_back(result.mask);
    result.network = ApplyMask(net, result.mask);
    return result;
  }

  const auto start = std::chrono::steady_clock::now();
  const FinetuneSchedule& schedule = *spec.finetune;
  const std::vector<double> rates = CumulativeRates(spec);
  Network current = net;
  Mask mask = FullMask(net);
  for (size_t round = 0; round < rates.size(); ++round) {
    mask = NextMask(current, spec, rates[round], &mask, spec.seed + round);
    current = MaskedNetwork(current, mask);
    const ParameterMask frozen = ToParameterMask(mask);
    TrainOptions options;
    options.epochs = schedule.epochs_per_round;
    options.learning_rate = schedule.learning_rate;
    options.batch_size = schedule.batch_size;
    options.seed = spec.seed * 1000003ULL + round;
    current = Train(current, *data, options, &frozen);
    result.round_masks.push_back(mask);
  }
  result.finetune_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.mask = mask;
  result.network = ApplyMask(current, mask);
  return result;
}

Network Prune(const Network& net, const PruningSpec& spec, const Dataset* data) {
  return PruneDetailed(net, spec, data).network;
}

}  // namespace nnsur
