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

// Solving an optimisation model over a pruned copy of a network while
// judging every candidate on the original dense network.
//
// A none-found result from the surrogate path says nothing about whether the
// dense network has an adversarial input. The method is a heuristic.

#ifndef NNSUR_SURROGATE_H_
#define NNSUR_SURROGATE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/branch_and_bound.h"
#include "nnsur/network.h"

namespace nnsur {

// Margin a dense candidate must clear to count as adversarial.
inline constexpr double kAdversarialMargin = 1e-9;
// Slack allowed on the L1 budget of a returned input.
inline constexpr double kBallTolerance = 1e-6;

// A correctly classified input x0 of `dense` with perturbation budget eps
// (L1) and target class j_prime. The constructor throws StructuralError when
// dense does not classify x0 as j with a strict margin.
class VerificationInstance {
 public:
  VerificationInstance(Network dense, Eigen::VectorXd x0, double eps, int j,
                       int j_prime);

  const Network& dense() const { return dense_; }
  const Eigen::VectorXd& x0() const { return x0_; }
  double eps() const { return eps_; }
  int j() const { return j_; }
  int j_prime() const { return j_prime_; }

 private:
  Network dense_;
  Eigen::VectorXd x0_;
  double eps_;
  int j_;
  int j_prime_;
};

enum class SurrogateOutcome { kAdversarialFound, kNoneFound, kBestValue };

std::string ToString(SurrogateOutcome outcome);

struct SurrogateResult {
  SurrogateOutcome outcome = SurrogateOutcome::kNoneFound;
  // Adversarial input, or the best input found when maximising.
  std::optional<Eigen::VectorXd> x;
  // Dense margin y_j' - y_j of x when verifying; dense output y* when
  // maximising. -inf without x.
  double value = -kInfinity;
  double wall_time = 0.0;
  int64_t incumbents_evaluated = 0;
  // Verification: incumbents that passed the dense check. Maximisation:
  // incumbents that improved the dense best value.
  int64_t incumbents_accepted = 0;
  SolveStatus solver_status = SolveStatus::kTimeoutNoIncumbent;
  double solver_bound = kInfinity;
  SolveStatistics stats;
  int binaries = 0;
  // Maximisation only: dense best value after each incumbent.
  std::vector<double> trace;
};

SurrogateResult VerifyViaSurrogate(const VerificationInstance& instance,
                                   const Network& sparse, const SolverConfig& config);
SurrogateResult MaximizeViaSurrogate(const Network& dense, const Network& sparse,
                                     const SolverConfig& config);

SurrogateResult VerifyDirect(const VerificationInstance& instance,
                             const SolverConfig& config);
SurrogateResult MaximizeDirect(const Network& dense, const SolverConfig& config);

// Pulls x back onto the L1 ball around x0 when solver tolerances leave it
// slightly outside. Points already inside are returned unchanged.
Eigen::VectorXd ProjectIntoBall(const Eigen::VectorXd& x, const Eigen::VectorXd& x0,
                                double eps);

}  // namespace nnsur

#endif  // NNSUR_SURROGATE_H_
