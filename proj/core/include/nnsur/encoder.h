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

// MILP encodings of ReLU networks.
//
// Every layer gets g = W h_prev + b. An unstable hidden neuron with
// (slack-inflated) pre-activation bounds lo < 0 < hi becomes
//
//   h >= g,   h >= 0,   h <= g - lo (1 - z),   h <= hi z,   z in {0, 1}
//
// which is exact: z = 1 forces h = g >= 0 and z = 0 forces h = 0 >= g.
// Stable neurons are substituted before any variable is created: a stably
// inactive neuron is a single variable fixed to 0, a stably active one a
// single variable h = g. The output layer is affine.

#ifndef NNSUR_ENCODER_H_
#define NNSUR_ENCODER_H_

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/bounds.h"
#include "nnsur/milp_model.h"
#include "nnsur/network.h"

namespace nnsur {

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EncodeOptions {
  double big_m_slack = kBigMSlack;
};

// Variable indices of one encoded network. Entries are -1 where a quantity
// has no variable of its own (no g for a stable neuron, no z for a stable
// neuron). For a stably active neuron pre and post share one variable.
struct NetworkEncoding {
  std::vector<int> inputs;
  std::vector<std::vector<int>> pre;
  std::vector<std::vector<int>> post;
  std::vector<std::vector<int>> indicator;
  std::vector<int> outputs;
  int binary_count = 0;
};

// Appends the network to `model`, reading its input from `input_vars`.
// Variables are created layer-major, then by neuron index.
NetworkEncoding EncodeNetwork(const Network& net, const ActivationBounds& bounds,
                              std::span<const int> input_vars, MilpModel& model,
                              const EncodeOptions& options = {});

struct EncodedProblem {
  MilpModel model;
  NetworkEncoding encoding;
  std::vector<int> deltas;  // VNN only
};

// max y_{j'} - y_j  s.t.  sum_k |x_k - x0_k| <= eps, x in the tightened box.
// `bounds` must be sound over that box; the overload without it computes
// them by interval propagation.
EncodedProblem EncodeVnn(const Network& net, const ActivationBounds& bounds,
                         const Eigen::VectorXd& x0, double eps, int j,
                         int j_prime, const EncodeOptions& options = {});
EncodedProblem EncodeVnn(const Network& net, const Eigen::VectorXd& x0,
                         double eps, int j, int j_prime,
                         const EncodeOptions& options = {});

// max y_1  s.t.  x in the network's input domain. Requires one output.
EncodedProblem EncodeFm(const Network& net, const ActivationBounds& bounds,
                        const EncodeOptions& options = {});
EncodedProblem EncodeFm(const Network& net, const EncodeOptions& options = {});

// Builds the full variable assignment induced by a forward pass from x:
// g, h, y from the network, z from the activation signs and, for VNN,
// delta_k = |x_k - x0_k|.
std::vector<double> AssignmentFromInput(const EncodedProblem& problem,
                                        const Network& net,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd* x0 = nullptr);

// Reads the input coordinates out of a solution vector.
Eigen::VectorXd ExtractInput(const EncodedProblem& problem,
                             std::span<const double> values);

}  // namespace nnsur

#endif  // NNSUR_ENCODER_H_
