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

#include "nnsur/simplex.h"

#include <algorithm>
#include <cmath>

namespace nnsur {

std::string ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericFailure: return "numeric-failure";
    case LpStatus::kTimeLimit: return "time-limit";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

// Ratios within this much of the minimum count as ties.
constexpr double kRatioTie = 1e-12;
// Steps at or below this are degenerate.
constexpr double kDegenerateStep = 1e-12;
// Row residual accepted when checking a finished solve.
constexpr double kResidualTolerance = 1e-6;

}  // namespace

SimplexSolver::SimplexSolver(const MilpModel& model, SimplexOptions options)
    : model_(model), options_(options) {
  m_ = model.num_constraints();
  n_ = model.num_variables();
  cols_ = n_ + 2 * m_;
  a_ = RowMatrix::Zero(m_, cols_);
  b_.resize(m_);
  for (int r = 0; r < m_; ++r) {
    const Constraint& c = model.constraints()[r];
    for (const Term& t : c.terms) a_(r, t.var) += t.coef;
    a_(r, n_ + r) = 1.0;
    b_[r] = c.rhs;
  }
  objective_ = Eigen::VectorXd::Zero(n_);
  for (const Term& t : model.objective()) objective_[t.var] += t.coef;
  iteration_cap_ = options_.iteration_limit > 0
                       ? options_.iteration_limit
                       : 50LL * (m_ + cols_) + 10000;
  cost_ = Eigen::VectorXd::Zero(cols_);
  d_ = Eigen::VectorXd::Zero(cols_);
  x_ = Eigen::VectorXd::Zero(cols_);
  lb_ = Eigen::VectorXd::Zero(cols_);
  ub_ = Eigen::VectorXd::Zero(cols_);
  basis_.assign(m_, -1);
  at_.assign(cols_, At::kLower);
}

void SimplexSolver::SetBounds(std::span<const double> lower,
                              std::span<const double> upper) {
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lower[j];
    ub_[j] = upper[j];
  }
  for (int r = 0; r < m_; ++r) {
    switch (model_.constraints()[r].relation) {
      case Relation::kLessEqual: lb_[n_ + r] = 0.0; ub_[n_ + r] = kInfinity; break;
      case Relation::kGreaterEqual: lb_[n_ + r] = -kInfinity; ub_[n_ + r] = 0.0; break;
      case Relation::kEqual: lb_[n_ + r] = 0.0; ub_[n_ + r] = 0.0; break;
    }
  }
}

void SimplexSolver::PlaceNonbasic(int j) {
  if (std::isfinite(lb_[j])) {
    at_[j] = At::kLower;
    x_[j] = lb_[j];
  } else if (std::isfinite(ub_[j])) {
    at_[j] = At::kUpper;
    x_[j] = ub_[j];
  } else {
    at_[j] = At::kZero;
    x_[j] = 0.0;
  }
}

void SimplexSolver::SetPhaseCosts(bool phase_one) {
  cost_.setZero();
  if (phase_one) {
    for (int r = 0; r < m_; ++r) {
      if (ub_[n_ + m_ + r] > 0.0) cost_[n_ + m_ + r] = 1.0;
    }
  } else {
    cost_.head(n_) = -objective_;
  }
}

void SimplexSolver::RecomputeReducedCosts() {
  Eigen::VectorXd cb(m_);
  for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
  d_ = cost_ - (cb.transpose() * t_).transpose();
  for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

void SimplexSolver::RecomputeBasics() {
  Eigen::VectorXd nonbasic = x_;
  for (int i = 0; i < m_; ++i) nonbasic[basis_[i]] = 0.0;
  const Eigen::VectorXd beta = tb_ - t_ * nonbasic;
  for (int i = 0; i < m_; ++i) x_[basis_[i]] = beta[i];
}

bool SimplexSolver::Refactor() {
  if (m_ == 0) return true;
  Eigen::MatrixXd basis_matrix(m_, m_);
  for (int i = 0; i < m_; ++i) basis_matrix.col(i) = a_.col(basis_[i]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  if (!(lu.rcond() > 1e-14)) return false;
  Eigen::MatrixXd full = a_;
  t_ = lu.solve(full);
  tb_ = lu.solve(b_);
  if (!t_.allFinite() || !tb_.allFinite()) return false;
  for (int i = 0; i < m_; ++i) {
    t_.col(basis_[i]).setZero();
    t_(i, basis_[i]) = 1.0;
  }
  RecomputeBasics();
  RecomputeReducedCosts();
  pivots_since_refactor_ = 0;
  ++refactorizations_;
  return true;
}

void SimplexSolver::Pivot(int row, int col) {
  const double pivot = t_(row, col);
  t_.row(row) /= pivot;
  tb_[row] /= pivot;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    const double f = t_(i, col);
    if (f == 0.0) continue;
    t_.row(i) -= f * t_.row(row);
    tb_[i] -= f * tb_[row];
    t_(i, col) = 0.0;
  }
  t_(row, col) = 1.0;
  const double dq = d_[col];
  if (dq != 0.0) {
    d_ -= dq * t_.row(row).transpose();
    d_[col] = 0.0;
  }
  basis_[row] = col;
  at_[col] = At::kBasic;
  ++pivots_since_refactor_;
}

bool SimplexSolver::Tick(Deadline deadline, Loop* stop) {
  ++iterations_;
  ++total_iterations_;
  if (iterations_ > iteration_cap_) {
    *stop = Loop::kIterationLimit;
    return false;
  }
  if (deadline) {
    const auto now = std::chrono::steady_clock::now();
    max_check_interval_ =
        std::max(max_check_interval_, std::chrono::duration<double>(now - last_check_).count());
    last_check_ = now;
    if (now >= *deadline) {
      *stop = Loop::kTimeLimit;
      return false;
    }
  }
  return true;
}

bool SimplexSolver::DualFeasible() const {
  const double tol = options_.optimality_tolerance;
  for (int j = 0; j < cols_; ++j) {
    if (at_[j] == At::kBasic || lb_[j] == ub_[j]) continue;
    const bool can_up = at_[j] == At::kLower || at_[j] == At::kZero;
    const bool can_down = at_[j] == At::kUpper || at_[j] == At::kZero;
    if (can_up && d_[j] < -tol) return false;
    if (can_down && d_[j] > tol) return false;
  }
  return true;
}

SimplexSolver::Loop SimplexSolver::PrimalLoop(Deadline deadline) {
  const double opt_tol = options_.optimality_tolerance;
  const double piv_tol = options_.pivot_tolerance;
  const int64_t bland_after = 5LL * (m_ + cols_);
  int64_t degenerate_run = 0;
  bool bland = false;
  int verifications = 0;
  Loop stop = Loop::kDone;
  std::vector<double> limits(m_);

  while (true) {
    // Pricing.
    int q = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (at_[j] == At::kBasic || lb_[j] == ub_[j]) continue;
      const double dj = d_[j];
      const bool up = (at_[j] == At::kLower || at_[j] == At::kZero) && dj < -opt_tol;
      const bool down = (at_[j] == At::kUpper || at_[j] == At::kZero) && dj > opt_tol;
      if (!up && !down) continue;
      if (bland) {
        q = j;
        dir = up ? 1 : -1;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
        dir = up ? 1 : -1;
      }
    }
    if (q < 0) {
      // Confirm against freshly computed values before declaring optimality.
      if (verifications++ < 3) {
        RecomputeBasics();
        RecomputeReducedCosts();
        if (!DualFeasible()) continue;
      }
      return Loop::kDone;
    }
    if (!Tick(deadline, &stop)) return stop;

    // Ratio test, two passes: minimum ratio, then the best pivot among ties.
    double t_min = kInfinity;
    for (int i = 0; i < m_; ++i) {
      limits[i] = kInfinity;
      const double alpha = t_(i, q) * dir;
      if (std::abs(alpha) <= piv_tol) continue;
      const int bv = basis_[i];
      double limit;
      if (alpha > 0.0) {
        if (lb_[bv] == -kInfinity) continue;
        limit = (x_[bv] - lb_[bv]) / alpha;
      } else {
        if (ub_[bv] == kInfinity) continue;
        limit = (ub_[bv] - x_[bv]) / -alpha;
      }
      limits[i] = std::max(0.0, limit);
      t_min = std::min(t_min, limits[i]);
    }
    const double t_flip =
        std::isfinite(lb_[q]) && std::isfinite(ub_[q]) ? ub_[q] - lb_[q] : kInfinity;
    if (t_min == kInfinity && t_flip == kInfinity) return Loop::kUnbounded;

    if (t_flip <= t_min) {
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= t_(i, q) * dir * t_flip;
      if (dir > 0) {
        at_[q] = At::kUpper;
        x_[q] = ub_[q];
      } else {
        at_[q] = At::kLower;
        x_[q] = lb_[q];
      }
      degenerate_run = 0;
      bland = false;
      continue;
    }

    int r = -1;
    for (int i = 0; i < m_; ++i) {
      if (limits[i] > t_min + kRatioTie) continue;
      if (r < 0) {
        r = i;
      } else if (bland ? basis_[i] < basis_[r]
                       : std::abs(t_(i, q)) > std::abs(t_(r, q))) {
        r = i;
      }
    }
    const double step = t_min;
    const int leaving = basis_[r];
    const bool leaves_at_lower = t_(r, q) * dir > 0.0;
    for (int i = 0; i < m_; ++i) x_[basis_[i]] -= t_(i, q) * dir * step;
    x_[q] += dir * step;
    Pivot(r, q);
    if (leaves_at_lower) {
      at_[leaving] = At::kLower;
      x_[leaving] = lb_[leaving];
    } else {
      at_[leaving] = At::kUpper;
      x_[leaving] = ub_[leaving];
    }
    if (step <= kDegenerateStep) {
      if (++degenerate_run >= bland_after) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    if (pivots_since_refactor_ >= options_.refactor_interval && !Refactor()) {
      return Loop::kNumeric;
    }
  }
}

SimplexSolver::Loop SimplexSolver::DualLoop(Deadline deadline) {
  const double feas_tol = options_.feasibility_tolerance;
  const double piv_tol = options_.pivot_tolerance;
  int verifications = 0;
  Loop stop = Loop::kDone;
  std::vector<double> ratios(cols_);

  while (true) {
    int r = -1;
    double worst = feas_tol;
    for (int i = 0; i < m_; ++i) {
      const int bv = basis_[i];
      const double violation = std::max(lb_[bv] - x_[bv], x_[bv] - ub_[bv]);
      if (violation > worst) {
        worst = violation;
        r = i;
      }
    }
    if (r < 0) {
      if (verifications++ < 3) {
        const Eigen::VectorXd before = x_;
        RecomputeBasics();
        if ((x_ - before).cwiseAbs().maxCoeff() > feas_tol) continue;
      }
      return Loop::kDone;
    }
    if (!Tick(deadline, &stop)) return stop;

    const int leaving = basis_[r];
    const bool increase = x_[leaving] < lb_[leaving];
    const double target = increase ? lb_[leaving] : ub_[leaving];

    double best_ratio = kInfinity;
    for (int j = 0; j < cols_; ++j) {
      ratios[j] = kInfinity;
      if (at_[j] == At::kBasic || lb_[j] == ub_[j]) continue;
      const double a = t_(r, j);
      if (std::abs(a) <= piv_tol) continue;
      const bool can_up = at_[j] == At::kLower || at_[j] == At::kZero;
      const bool can_down = at_[j] == At::kUpper || at_[j] == At::kZero;
      const bool ok = increase ? ((a < 0 && can_up) || (a > 0 && can_down))
                               : ((a > 0 && can_up) || (a < 0 && can_down));
      if (!ok) continue;
      ratios[j] = std::abs(d_[j]) / std::abs(a);
      best_ratio = std::min(best_ratio, ratios[j]);
    }
    if (best_ratio == kInfinity) {
      return CertifiesInfeasible(r) ? Loop::kInfeasible : Loop::kNumeric;
    }
    int q = -1;
    for (int j = 0; j < cols_; ++j) {
      if (ratios[j] > best_ratio + kRatioTie) continue;
      if (q < 0 || std::abs(t_(r, j)) > std::abs(t_(r, q))) q = j;
    }

    const double delta = (x_[leaving] - target) / t_(r, q);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] -= t_(i, q) * delta;
    x_[q] += delta;
    Pivot(r, q);
    at_[leaving] = increase ? At::kLower : At::kUpper;
    x_[leaving] = target;
    if (pivots_since_refactor_ >= options_.refactor_interval && !Refactor()) {
      return Loop::kNumeric;
    }
  }
}

bool SimplexSolver::CertifiesInfeasible(int row) const {
  // Any multiplier vector y gives the valid equation (y^T A) x = y^T b. Row
  // `row` of B^-1 sits in the slack block of the tableau.
  const Eigen::VectorXd y = t_.row(row).segment(n_, m_).transpose();
  const Eigen::VectorXd coef = (y.transpose() * a_).transpose();
  const double rhs = y.dot(b_);
  double lo = 0.0;
  double hi = 0.0;
  for (int j = 0; j < cols_; ++j) {
    const double c = coef[j];
    if (c == 0.0) continue;
    const double at_lb = c * lb_[j];
    const double at_ub = c * ub_[j];
    const double a = c > 0 ? at_lb : at_ub;
    const double b = c > 0 ? at_ub : at_lb;
    lo += std::isnan(a) ? -kInfinity : a;
    hi += std::isnan(b) ? kInfinity : b;
  }
  const double tol = options_.feasibility_tolerance * (1.0 + std::abs(rhs));
  return rhs < lo - tol || rhs > hi + tol;
}

double SimplexSolver::DualBound() const {
  // Row multipliers for the minimisation form, projected so that every slack
  // term is nonnegative. Weak duality over the column bounds then bounds the
  // maximisation objective from above.
  Eigen::VectorXd pi(m_);
  for (int r = 0; r < m_; ++r) {
    double v = -d_[n_ + r];
    switch (model_.constraints()[r].relation) {
      case Relation::kLessEqual: v = std::min(v, 0.0); break;
      case Relation::kGreaterEqual: v = std::max(v, 0.0); break;
      case Relation::kEqual: break;
    }
    pi[r] = v;
  }
  const Eigen::VectorXd pa = (pi.transpose() * a_.leftCols(n_)).transpose();
  double min_value = pi.dot(b_);
  for (int j = 0; j < n_; ++j) {
    const double reduced = -objective_[j] - pa[j];
    if (reduced == 0.0) continue;
    const double bound = reduced > 0 ? lb_[j] : ub_[j];
    if (!std::isfinite(bound)) return kInfinity;
    min_value += reduced * bound;
  }
  return -min_value;
}

double SimplexSolver::MaxPrimalInfeasibility() const {
  const Eigen::VectorXd activity = a_.leftCols(n_) * x_.head(n_);
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) {
    const double scale = 1.0 + std::abs(b_[r]);
    double v = 0.0;
    switch (model_.constraints()[r].relation) {
      case Relation::kLessEqual: v = activity[r] - b_[r]; break;
      case Relation::kGreaterEqual: v = b_[r] - activity[r]; break;
      case Relation::kEqual: v = std::abs(activity[r] - b_[r]); break;
    }
    worst = std::max(worst, v / scale);
  }
  return worst;
}

LpResult SimplexSolver::Finish(Loop loop, bool warm) {
  LpResult result;
  result.iterations = iterations_;
  result.warm = warm;
  switch (loop) {
    case Loop::kInfeasible: result.status = LpStatus::kInfeasible; return result;
    case Loop::kUnbounded: result.status = LpStatus::kUnbounded; return result;
    case Loop::kTimeLimit: result.status = LpStatus::kTimeLimit; return result;
    case Loop::kIterationLimit: result.status = LpStatus::kIterationLimit; return result;
    case Loop::kNumeric: result.status = LpStatus::kNumericFailure; return result;
    case Loop::kDone: break;
  }
  for (int j = 0; j < n_; ++j) x_[j] = std::clamp(x_[j], lb_[j], ub_[j]);
  if (MaxPrimalInfeasibility() > kResidualTolerance) {
    result.status = LpStatus::kNumericFailure;
    return result;
  }
  result.values.assign(x_.data(), x_.data() + n_);
  result.objective = objective_.dot(x_.head(n_));
  result.bound = std::max(DualBound(), result.objective);
  if (result.bound - result.objective > 1e-6 * (1.0 + std::abs(result.objective))) {
    result.status = LpStatus::kNumericFailure;
    return result;
  }
  result.status = LpStatus::kOptimal;
  return result;
}

LpResult SimplexSolver::Solve(std::span<const double> lower,
                              std::span<const double> upper, Deadline deadline) {
  last_check_ = std::chrono::steady_clock::now();
  have_basis_ = false;
  iterations_ = 0;
  SetBounds(lower, upper);
  a_.rightCols(m_).setZero();
  for (int j = 0; j < n_; ++j) PlaceNonbasic(j);
  for (int r = 0; r < m_; ++r) {
    const int art = n_ + m_ + r;
    lb_[art] = ub_[art] = 0.0;
    at_[art] = At::kLower;
    x_[art] = 0.0;
  }
  const Eigen::VectorXd residual = b_ - a_.leftCols(n_) * x_.head(n_);
  bool any_artificial = false;
  for (int r = 0; r < m_; ++r) {
    const int slack = n_ + r;
    const double v = residual[r];
    if (v >= lb_[slack] && v <= ub_[slack]) {
      basis_[r] = slack;
      at_[slack] = At::kBasic;
      x_[slack] = v;
      continue;
    }
    const double clamp = v < lb_[slack] ? lb_[slack] : ub_[slack];
    at_[slack] = v < lb_[slack] ? At::kLower : At::kUpper;
    x_[slack] = clamp;
    const int art = n_ + m_ + r;
    a_(r, art) = v > clamp ? 1.0 : -1.0;
    ub_[art] = kInfinity;
    basis_[r] = art;
    at_[art] = At::kBasic;
    any_artificial = true;
  }
  t_ = a_;
  tb_ = b_;
  for (int r = 0; r < m_; ++r) {
    const int art = n_ + m_ + r;
    if (basis_[r] == art && a_(r, art) < 0) {
      t_.row(r) *= -1.0;
      tb_[r] *= -1.0;
    }
  }
  pivots_since_refactor_ = 0;
  RecomputeBasics();

  if (any_artificial) {
    SetPhaseCosts(true);
    RecomputeReducedCosts();
    const Loop loop = PrimalLoop(deadline);
    if (loop != Loop::kDone) return Finish(loop == Loop::kUnbounded ? Loop::kNumeric : loop, false);
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) worst = std::max(worst, x_[n_ + m_ + r]);
    if (worst > options_.feasibility_tolerance) return Finish(Loop::kInfeasible, false);
    for (int r = 0; r < m_; ++r) {
      const int art = n_ + m_ + r;
      ub_[art] = 0.0;
      if (at_[art] != At::kBasic) {
        at_[art] = At::kLower;
        x_[art] = 0.0;
      }
    }
  }
  SetPhaseCosts(false);
  RecomputeReducedCosts();
  Loop loop = PrimalLoop(deadline);
  if (loop == Loop::kDone) {
    // Drift can leave basics slightly outside their bounds; the basis is dual
    // feasible here, so the dual simplex repairs it.
    loop = DualLoop(deadline);
  }
  LpResult result = Finish(loop, false);
  if (result.status == LpStatus::kNumericFailure && loop == Loop::kDone && Refactor()) {
    loop = DualLoop(deadline);
    if (loop == Loop::kDone) loop = PrimalLoop(deadline);
    result = Finish(loop, false);
  }
  have_basis_ = result.status == LpStatus::kOptimal ||
                (result.status == LpStatus::kInfeasible && loop == Loop::kInfeasible &&
                 any_artificial == false);
  have_basis_ = have_basis_ && DualFeasible();
  return result;
}

LpResult SimplexSolver::Resolve(std::span<const double> lower,
                                std::span<const double> upper, Deadline deadline) {
  if (!have_basis_) return Solve(lower, upper, deadline);
  last_check_ = std::chrono::steady_clock::now();
  iterations_ = 0;
  SetBounds(lower, upper);
  for (int r = 0; r < m_; ++r) ub_[n_ + m_ + r] = 0.0;
  const double tol = options_.optimality_tolerance;
  for (int j = 0; j < cols_; ++j) {
    if (at_[j] == At::kBasic) continue;
    const bool lower_ok = std::isfinite(lb_[j]);
    const bool upper_ok = std::isfinite(ub_[j]);
    if (lb_[j] == ub_[j]) {
      at_[j] = At::kLower;
      x_[j] = lb_[j];
    } else if (d_[j] > tol) {
      if (!lower_ok) return ++cold_fallbacks_, Solve(lower, upper, deadline);
      at_[j] = At::kLower;
      x_[j] = lb_[j];
    } else if (d_[j] < -tol) {
      if (!upper_ok) return ++cold_fallbacks_, Solve(lower, upper, deadline);
      at_[j] = At::kUpper;
      x_[j] = ub_[j];
    } else if (at_[j] == At::kUpper && upper_ok) {
      x_[j] = ub_[j];
    } else if (lower_ok) {
      at_[j] = At::kLower;
      x_[j] = lb_[j];
    } else if (upper_ok) {
      at_[j] = At::kUpper;
      x_[j] = ub_[j];
    } else {
      at_[j] = At::kZero;
      x_[j] = 0.0;
    }
  }
  if (pivots_since_refactor_ >= options_.refactor_interval && !Refactor()) {
    ++cold_fallbacks_;
    return Solve(lower, upper, deadline);
  }
  RecomputeBasics();

  Loop loop = DualLoop(deadline);
  if (loop == Loop::kDone && !DualFeasible()) {
    loop = PrimalLoop(deadline);
    if (loop == Loop::kDone) loop = DualLoop(deadline);
  }
  if (loop == Loop::kTimeLimit) {
    have_basis_ = DualFeasible();
    return Finish(loop, true);
  }
  LpResult result = Finish(loop, true);
  if (result.status == LpStatus::kOptimal ||
      (result.status == LpStatus::kInfeasible)) {
    return result;
  }
  ++cold_fallbacks_;
  const int64_t warm_iterations = iterations_;
  result = Solve(lower, upper, deadline);
  result.iterations += warm_iterations;
  return result;
}

LpResult SolveLp(const MilpModel& model, std::span<const BoundOverride> overlay,
                 const SimplexOptions& options, Deadline deadline) {
  std::vector<double> lower(model.num_variables());
  std::vector<double> upper(model.num_variables());
  for (int j = 0; j < model.num_variables(); ++j) {
    lower[j] = model.variables()[j].lower;
    upper[j] = model.variables()[j].upper;
  }
  for (const BoundOverride& o : overlay) {
    if (o.var < 0 || o.var >= model.num_variables()) {
      throw ModelError("bound override names an undeclared variable");
    }
    lower[o.var] = o.lower;
    upper[o.var] = o.upper;
  }
  SimplexSolver solver(model, options);
  return solver.Solve(lower, upper, deadline);
}

}  // namespace nnsur
