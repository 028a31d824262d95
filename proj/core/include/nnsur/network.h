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

#ifndef NNSUR_NETWORK_H_
#define NNSUR_NETWORK_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nnsur {

// Raised when shapes or dimensions do not line up.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Axis-aligned box [lower_k, upper_k] per coordinate.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box Uniform(int size, double lo, double hi);

  int size() const { return static_cast<int>(lower.size()); }
  bool Contains(const Eigen::VectorXd& x, double tolerance = 0.0) const;
  Eigen::VectorXd Midpoint() const { return 0.5 * (lower + upper); }

  friend bool operator==(const Box& a, const Box& b);
};

// A fully-connected ReLU network. Layer l (1-based in the usual notation,
// 0-based here) maps dims[l] inputs to dims[l + 1] outputs. Hidden layers
// apply ReLU; the final layer is affine only.
struct Network {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;   // biases[l] has dims[l+1] entries
  Box domain;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int input_size() const { return dims.front(); }
  int output_size() const { return dims.back(); }
  bool is_output_layer(int layer) const { return layer + 1 == layer_count(); }

  // Total number of weight entries (biases excluded).
  int64_t weight_count() const;
  int64_t nonzero_weight_count() const;

  // Throws StructuralError if any invariant is broken.
  void Validate() const;

  friend bool operator==(const Network& a, const Network& b);
};

// Every pre- and post-activation of one forward pass. For the output layer
// post == pre.
struct LayerActivations {
  Eigen::VectorXd input;
  std::vector<Eigen::VectorXd> pre;
  std::vector<Eigen::VectorXd> post;

  const Eigen::VectorXd& output() const { return post.back(); }
};

LayerActivations Forward(const Network& net, const Eigen::VectorXd& x);

// Output only; same arithmetic as Forward.
Eigen::VectorXd Evaluate(const Network& net, const Eigen::VectorXd& x);

// Glorot-uniform weights, zero biases. Deterministic per seed.
Network RandomInit(std::span<const int> dims, uint64_t seed, const Box& domain);
Network RandomInit(std::span<const int> dims, uint64_t seed);

// Index of the largest output; lowest index wins ties.
int ArgMax(const Eigen::VectorXd& v);

// Largest output other than `exclude`.
int RunnerUp(const Eigen::VectorXd& v, int exclude);

}  // namespace nnsur

#endif  // NNSUR_NETWORK_H_
