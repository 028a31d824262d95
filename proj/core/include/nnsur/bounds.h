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

#ifndef NNSUR_BOUNDS_H_
#define NNSUR_BOUNDS_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/network.h"

namespace nnsur {

// Absolute slack added to interval bounds before they become big-M
// constants.
inline constexpr double kBigMSlack = 1e-6;

enum class Stability { kStablyActive, kStablyInactive, kUnstable };

class InfeasibleDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pre-activation intervals for every neuron, from interval arithmetic over an
// input box. Post intervals are [max(0, lo), max(0, hi)] on hidden layers and
// equal to the pre intervals on the output layer.
struct ActivationBounds {
  Box input;
  std::vector<Eigen::VectorXd> pre_lo;
  std::vector<Eigen::VectorXd> pre_hi;
  std::vector<Eigen::VectorXd> post_lo;
  std::vector<Eigen::VectorXd> post_hi;

  int layer_count() const { return static_cast<int>(pre_lo.size()); }
  // Meaningful for hidden layers; lo == hi == 0 counts as inactive.
  Stability stability(int layer, int neuron) const;
};

ActivationBounds IntervalPropagate(const Network& net, const Box& input);
ActivationBounds IntervalPropagate(const Network& net);

// [max(lo_k, x0_k - eps), min(hi_k, x0_k + eps)]: the box relaxation of the
// L1 ball intersected with the domain. Throws InfeasibleDomainError if any
// coordinate becomes empty.
Box TightenToBall(const Box& domain, const Eigen::VectorXd& center, double eps);

struct LayerStability {
  int active = 0;
  int inactive = 0;
  int unstable = 0;
  int total() const { return active + inactive + unstable; }
};

// One entry per hidden layer.
std::vector<LayerStability> StabilitySummary(const ActivationBounds& bounds);

// Dumps layer,neuron,pre_lo,pre_hi,stability rows.
std::string BoundsToCsv(const ActivationBounds& bounds);

}  // namespace nnsur

#endif  // NNSUR_BOUNDS_H_
