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

// Dense-tableau bounded-variable simplex for the LP relaxation of a
// MilpModel (binaries relaxed to [0, 1]).
//
// Rows are turned into equalities with one slack each; a cold start runs a
// two-phase primal simplex from the slack basis with one artificial per
// row whose slack starts out of bounds. Pricing is Dantzig until
// 5 * (rows + columns) consecutive degenerate pivots, then Bland until the
// next non-degenerate pivot. Resolve() reuses the previous tableau: any
// optimal basis stays dual feasible under bound changes on boxed columns,
// so a dual simplex finishes the job. Every result is checked against the
// original rows and its upper bound is recomputed from the duals, which
// triggers a refactorisation or a cold restart when the tableau has drifted.

#ifndef NNSUR_SIMPLEX_H_
#define NNSUR_SIMPLEX_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nnsur/milp_model.h"

namespace nnsur {

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kNumericFailure,
  kTimeLimit,
  kIterationLimit,
};

std::string ToString(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kNumericFailure;
  std::vector<double> values;  // structural variables only
  double objective = 0.0;
  // Upper bound on the LP optimum from weak duality; >= objective up to
  // rounding. +inf when it cannot be certified.
  double bound = kInfinity;
  int64_t iterations = 0;
  bool warm = false;
};

struct BoundOverride {
  int var = -1;
  double lower = 0.0;
  double upper = 0.0;
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int64_t iteration_limit = 0;  // 0 picks a size-based default
  int refactor_interval = 2000;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpModel& model, SimplexOptions options = {});

  // Cold start from the slack basis.
  LpResult Solve(std::span<const double> lower, std::span<const double> upper,
                 Deadline deadline = std::nullopt);
  // Dual simplex from the last basis; falls back to Solve when there is no
  // usable basis or the warm path runs into trouble.
  LpResult Resolve(std::span<const double> lower, std::span<const double> upper,
                   Deadline deadline = std::nullopt);

  int rows() const { return m_; }
  int structural_columns() const { return n_; }
  int64_t total_iterations() const { return total_iterations_; }
  int64_t refactorizations() const { return refactorizations_; }
  int64_t cold_fallbacks() const { return cold_fallbacks_; }
  // Longest stretch between two deadline checks, setup included. Only
  // measured when a deadline is given.
  double max_check_interval_seconds() const { return max_check_interval_; }

 private:
  enum class At : uint8_t { kBasic, kLower, kUpper, kZero };
  enum class Loop { kDone, kInfeasible, kUnbounded, kTimeLimit, kIterationLimit,
                    kNumeric };

  void SetBounds(std::span<const double> lower, std::span<const double> upper);
  void PlaceNonbasic(int j);
  void SetPhaseCosts(bool phase_one);
  void RecomputeReducedCosts();
  void RecomputeBasics();
  bool Refactor();
  void Pivot(int row, int col);
  Loop PrimalLoop(Deadline deadline);
  Loop DualLoop(Deadline deadline);
  bool Tick(Deadline deadline, Loop* stop);
  LpResult Finish(Loop loop, bool warm);
  bool CertifiesInfeasible(int row) const;
  double DualBound() const;
  double MaxPrimalInfeasibility() const;
  bool DualFeasible() const;

  const MilpModel& model_;
  SimplexOptions options_;
  int m_ = 0;
  int n_ = 0;
  int cols_ = 0;  // n + 2m: structural, slack, artificial

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix a_;       // original rows in equality form
  Eigen::VectorXd b_;
  Eigen::VectorXd objective_;  // maximisation coefficients, structural only

  RowMatrix t_;       // B^-1 A
  Eigen::VectorXd tb_;  // B^-1 b
  Eigen::VectorXd cost_;  // internal minimisation costs
  Eigen::VectorXd d_;     // reduced costs
  Eigen::VectorXd x_;
  Eigen::VectorXd lb_;
  Eigen::VectorXd ub_;
  std::vector<int> basis_;
  std::vector<At> at_;

  bool have_basis_ = false;
  int64_t iterations_ = 0;
  int64_t iteration_cap_ = 0;
  int64_t total_iterations_ = 0;
  int64_t refactorizations_ = 0;
  int64_t cold_fallbacks_ = 0;
  int pivots_since_refactor_ = 0;
  std::chrono::steady_clock::time_point last_check_;
  double max_check_interval_ = 0.0;
};

// One-shot cold solve of the relaxation with optional bound overrides.
LpResult SolveLp(const MilpModel& model,
                 std::span<const BoundOverride> overlay = {},
                 const SimplexOptions& options = {},
                 Deadline deadline = std::nullopt);

}  // namespace nnsur

#endif  // NNSUR_SIMPLEX_H_
