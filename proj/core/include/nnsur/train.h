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

#ifndef NNSUR_TRAIN_H_
#define NNSUR_TRAIN_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/dataset.h"
#include "nnsur/network.h"

namespace nnsur {

struct TrainOptions {
  int epochs = 5;
  double learning_rate = 0.2;
  int batch_size = 32;
  uint64_t seed = 0;
};

// 1 marks a trainable parameter, 0 a parameter frozen at exactly zero.
struct ParameterMask {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

struct Gradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Mean softmax cross-entropy (classification) or mean squared error
// (regression) over the whole dataset.
double Loss(const Network& net, const Dataset& data);

// Full-batch gradient of Loss.
Gradient LossGradient(const Network& net, const Dataset& data);

// Fraction of samples whose arg-max output equals the label.
double Accuracy(const Network& net, const Dataset& data);

// Minibatch SGD. Parameters marked 0 in `frozen` have their gradient zeroed
// and stay exactly zero. Throws TrainingError when the loss stops being
// finite.
Network Train(const Network& net, const Dataset& data,
              const TrainOptions& options,
              const ParameterMask* frozen = nullptr);

}  // namespace nnsur

#endif  // NNSUR_TRAIN_H_
