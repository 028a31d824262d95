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

// Reference computations used by the tests. None of them goes through the
// MILP encoder or branch-and-bound.

#ifndef NNSUR_TESTS_ORACLES_H_
#define NNSUR_TESTS_ORACLES_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/network.h"

namespace nnsur::testing {

struct PatternOracleResult {
  double optimum = -1e300;
  Eigen::VectorXd argmax;
  int patterns = 0;           // activation patterns tried
  int feasible_patterns = 0;  // patterns whose region is nonempty
};

// Maximises output `out` (or out - minus when minus >= 0) of `net` over
// `box` by enumerating activation patterns of every neuron that interval
// propagation leaves unstable. Each pattern is one LP over x alone: the
// network is affine on the pattern's region, which is cut out by sign
// constraints on every pre-activation.
PatternOracleResult PatternEnumerationMax(const Network& net, const Box& box, int out = 0,
                                          int minus = -1);

// Dense LP  max c^T x  s.t.  A x <= b,  lo <= x <= hi  by enumerating every
// vertex. Returns nullopt when infeasible. Only for tiny instances.
std::optional<double> VertexEnumerationMax(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& c, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi);

// JSON text for `net` assembled by hand, in the documented network format.
std::string HandWrittenNetworkJson(const Network& net);

}  // namespace nnsur::testing

#endif  // NNSUR_TESTS_ORACLES_H_
