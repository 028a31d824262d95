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

#include "nnsur/train.h"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "nnsur/dataset.h"
#include "nnsur/network.h"

namespace nnsur {
namespace {

// Classes centred at (0.3, 0.3) and (0.7, 0.7).
Dataset TwoBlobs(int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.06);
  Dataset data;
  data.num_classes = 2;
  data.box = Box::Uniform(2, 0.0, 1.0);
  data.inputs.resize(2, samples);
  for (int s = 0; s < samples; ++s) {
    const int label = s % 2;
    data.labels.push_back(label);
    for (int k = 0; k < 2; ++k) {
      data.inputs(k, s) = std::clamp(0.3 + 0.4 * label + noise(rng), 0.0, 1.0);
    }
  }
  return data;
}

// Perceptron on (x, 1); converging with zero mistakes proves the data is
// linearly separable.
bool PerceptronSeparates(const Dataset& data) {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  for (int epoch = 0; epoch < 10000; ++epoch) {
    int mistakes = 0;
    for (int s = 0; s < data.size(); ++s) {
      const Eigen::Vector3d x(data.inputs(0, s), data.inputs(1, s), 1.0);
      const double sign = data.labels[s] == 1 ? 1.0 : -1.0;
      if (sign * w.dot(x) <= 0) {
        w += sign * x;
        ++mistakes;
      }
    }
    if (mistakes == 0) return true;
  }
  return false;
}

TEST(TrainTest, ZeroEpochsIsIdentity) {
  const Network net = RandomInit(std::vector<int>{2, 4, 2}, 1);
  TrainOptions opts;
  opts.epochs = 0;
  EXPECT_EQ(Train(net, TwoBlobs(20, 0), opts), net);
}

TEST(TrainTest, SeparableBlobsAreLearned) {
  const Dataset data = TwoBlobs(200, 3);
  ASSERT_TRUE(PerceptronSeparates(data));
  const Network net = RandomInit(std::vector<int>{2, 16, 2}, 0, data.box);
  TrainOptions opts;
  opts.epochs = 50;
  const Network trained = Train(net, data, opts);
  EXPECT_GE(Accuracy(trained, data), 0.95);
  EXPECT_LT(Loss(trained, data), Loss(net, data));
}

TEST(TrainTest, SameSeedSameResult) {
  const Dataset data = TwoBlobs(64, 1);
  const Network net = RandomInit(std::vector<int>{2, 8, 2}, 4, data.box);
  TrainOptions opts;
  opts.epochs = 3;
  opts.seed = 9;
  EXPECT_EQ(Train(net, data, opts), Train(net, data, opts));
}

TEST(TrainTest, GradientMatchesFiniteDifferences) {
  const Dataset data = MakeSyntheticClassification(3, 3, 12, 2);
  Network net = RandomInit(std::vector<int>{3, 5, 4, 3}, 6, data.box);
  for (auto& b : net.biases) b.setConstant(0.05);
  const Gradient grad = LossGradient(net, data);
  const double h = 1e-6;
  for (int l = 0; l < net.layer_count(); ++l) {
    for (int i = 0; i < net.weights[l].rows(); ++i) {
      for (int k = 0; k < net.weights[l].cols(); ++k) {
        Network plus = net, minus = net;
        plus.weights[l](i, k) += h;
        minus.weights[l](i, k) -= h;
        const double fd = (Loss(plus, data) - Loss(minus, data)) / (2 * h);
        EXPECT_NEAR(grad.weights[l](i, k), fd, 1e-6) << l << " " << i << " " << k;
      }
      Network plus = net, minus = net;
      plus.biases[l][i] += h;
      minus.biases[l][i] -= h;
      const double fd = (Loss(plus, data) - Loss(minus, data)) / (2 * h);
      EXPECT_NEAR(grad.biases[l][i], fd, 1e-6);
    }
  }
}

TEST(TrainTest, FrozenPositionsKeepTheirValue) {
  const Dataset data = MakeSyntheticClassification(4, 3, 60, 5);
  Network net = RandomInit(std::vector<int>{4, 6, 3}, 2, data.box);
  ParameterMask frozen;
  for (int l = 0; l < net.layer_count(); ++l) {
    frozen.weights.push_back(Eigen::MatrixXd::Ones(net.weights[l].rows(), net.weights[l].cols()));
    frozen.biases.push_back(Eigen::VectorXd::Ones(net.biases[l].size()));
  }
  net.weights[0].row(2).setZero();
  frozen.weights[0].row(2).setZero();
  net.weights[1](1, 4) = 0.0;
  frozen.weights[1](1, 4) = 0.0;
  TrainOptions opts;
  opts.epochs = 10;
  const Network trained = Train(net, data, opts, &frozen);
  EXPECT_TRUE(trained.weights[0].row(2).isZero(0.0));
  EXPECT_EQ(trained.weights[1](1, 4), 0.0);
  EXPECT_NE(trained.weights[0], net.weights[0]);
}

}  // namespace
}  // namespace nnsur
