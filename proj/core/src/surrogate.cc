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

#include "nnsur/surrogate.h"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "nnsur/bounds.h"
#include "nnsur/encoder.h"

namespace nnsur {

VerificationInstance::VerificationInstance(Network dense, Eigen::VectorXd x0,
                                           double eps, int j, int j_prime)
    : dense_(std::move(dense)), x0_(std::move(x0)), eps_(eps), j_(j), j_prime_(j_prime) {
  dense_.Validate();
  if (x0_.size() != dense_.input_size()) {
    throw StructuralError("x0 does not match the network input size");
  }
  if (!(eps_ >= 0.0) || !std::isfinite(eps_)) {
    throw StructuralError("eps must be finite and nonnegative");
  }
  const int classes = dense_.output_size();
  if (j_ < 0 || j_ >= classes || j_prime_ < 0 || j_prime_ >= classes || j_ == j_prime_) {
    throw StructuralError(fmt::format("bad class pair ({}, {})", j_, j_prime_));
  }
  const Eigen::VectorXd y = Evaluate(dense_, x0_);
  for (int k = 0; k < classes; ++k) {
    if (k != j_ && !(y[j_] > y[k])) {
      throw StructuralError(fmt::format("x0 is not classified as class {}", j_));
    }
  }
}

std::string ToString(SurrogateOutcome outcome) {
  switch (outcome) {
    case SurrogateOutcome::kAdversarialFound: return "adversarial-found";
    case SurrogateOutcome::kNoneFound: return "none-found";
    case SurrogateOutcome::kBestValue: return "best-value";
  }
  return "unknown";
}

Eigen::VectorXd ProjectIntoBall(const Eigen::VectorXd& x, const Eigen::VectorXd& x0,
                                double eps) {
  const Eigen::VectorXd step = x - x0;
  const double norm = step.lpNorm<1>();
  if (norm <= eps) return x;
  // Shrinking toward x0 stays inside any box that holds both points.
  return x0 + step * (eps / norm);
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

void CheckSameShape(const Network& dense, const Network& sparse) {
  if (dense.input_size() != sparse.input_size() ||
      dense.output_size() != sparse.output_size()) {
    throw StructuralError(fmt::format(
        "surrogate shape {}->{} does not match dense {}->{}", sparse.input_size(),
        sparse.output_size(), dense.input_size(), dense.output_size()));
  }
}

void Record(const SolveOutcome& outcome, SurrogateResult& result) {
  result.solver_status = outcome.status;
  result.solver_bound = outcome.best_bound;
  result.stats = outcome.stats;
}

}  // namespace

SurrogateResult VerifyViaSurrogate(const VerificationInstance& instance,
                                   const Network& sparse, const SolverConfig& config) {
  const Network& dense = instance.dense();
  CheckSameShape(dense, sparse);
  const Eigen::VectorXd& x0 = instance.x0();
  const double eps = instance.eps();
  const int j = instance.j();
  const int jp = instance.j_prime();

  const ActivationBounds bounds =
      IntervalPropagate(sparse, TightenToBall(sparse.domain, x0, eps));
  const EncodedProblem problem = EncodeVnn(sparse, bounds, x0, eps, j, jp);

  SurrogateResult result;
  result.binaries = problem.model.num_binaries();
  const auto callback = [&](std::span<const double> values, double) {
    ++result.incumbents_evaluated;
    const Eigen::VectorXd x = ProjectIntoBall(ExtractInput(problem, values), x0, eps);
    const Eigen::VectorXd y = Evaluate(dense, x);
    const double margin = y[jp] - y[j];
    if (margin > kAdversarialMargin) {
      ++result.incumbents_accepted;
      result.x = x;
      result.value = margin;
      return CallbackAction::kStop;
    }
    return CallbackAction::kContinue;
  };
  const Clock::time_point start = Clock::now();
  const SolveOutcome outcome = BranchAndBound(problem.model, config, callback);
  result.wall_time = Seconds(start);
  Record(outcome, result);

  if (!result.x) return result;
  result.outcome = SurrogateOutcome::kAdversarialFound;
  const Eigen::VectorXd& x = *result.x;
  const Eigen::VectorXd y = Evaluate(dense, x);
  if ((x - x0).lpNorm<1>() > eps + kBallTolerance || !dense.domain.Contains(x, 1e-9) ||
      !(y[jp] - y[j] > kAdversarialMargin)) {
    throw std::logic_error("adversarial input failed its dense recheck");
  }
  return result;
}

SurrogateResult MaximizeViaSurrogate(const Network& dense, const Network& sparse,
                                     const SolverConfig& config) {
  CheckSameShape(dense, sparse);
  if (dense.output_size() != 1) {
    throw StructuralError("maximisation needs single-output networks");
  }
  if (!(dense.domain == sparse.domain)) {
    throw StructuralError("dense and surrogate networks have different domains");
  }
  const EncodedProblem problem = EncodeFm(sparse);

  SurrogateResult result;
  result.outcome = SurrogateOutcome::kBestValue;
  result.binaries = problem.model.num_binaries();
  const auto callback = [&](std::span<const double> values, double) {
    ++result.incumbents_evaluated;
    const Eigen::VectorXd x = ExtractInput(problem, values);
    const double y = Evaluate(dense, x)[0];
    if (!result.x || y > result.value) {
      ++result.incumbents_accepted;
      result.x = x;
      result.value = y;
    }
    result.trace.push_back(result.value);
    return CallbackAction::kContinue;
  };
  const Clock::time_point start = Clock::now();
  const SolveOutcome outcome = BranchAndBound(problem.model, config, callback);
  result.wall_time = Seconds(start);
  Record(outcome, result);
  if (result.x) result.value = Evaluate(dense, *result.x)[0];
  return result;
}

SurrogateResult VerifyDirect(const VerificationInstance& instance,
                             const SolverConfig& config) {
  return VerifyViaSurrogate(instance, instance.dense(), config);
}

SurrogateResult MaximizeDirect(const Network& dense, const SolverConfig& config) {
  return MaximizeViaSurrogate(dense, dense, config);
}

}  // namespace nnsur
