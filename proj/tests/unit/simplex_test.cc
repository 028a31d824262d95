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

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace nnsur {
namespace {

MilpModel FromDense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c, const Eigen::VectorXd& lo,
                    const Eigen::VectorXd& hi) {
  MilpModel model;
  for (int k = 0; k < c.size(); ++k) model.AddVariable("x" + std::to_string(k), lo[k], hi[k]);
  for (int r = 0; r < a.rows(); ++r) {
    std::vector<Term> terms;
    for (int k = 0; k < a.cols(); ++k) {
      if (a(r, k) != 0.0) terms.push_back({k, a(r, k)});
    }
    model.AddConstraint("r" + std::to_string(r), terms, Relation::kLessEqual, b[r]);
  }
  std::vector<Term> obj;
  for (int k = 0; k < c.size(); ++k) obj.push_back({k, c[k]});
  model.SetObjective(obj);
  return model;
}

TEST(SimplexTest, SingleBoundedVariable) {
  MilpModel m;
  const int x = m.AddVariable("x", 0.0, 10.0);
  m.AddConstraint("cap", {{x, 1.0}}, Relation::kLessEqual, 3.0);
  m.SetObjective({{x, 1.0}});
  const LpResult r = SolveLp(m);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-12);
  EXPECT_NEAR(r.values[x], 3.0, 1e-12);
  EXPECT_GE(r.bound, r.objective - 1e-12);
}

TEST(SimplexTest, ContradictoryRowsAreInfeasible) {
  MilpModel m;
  const int x = m.AddVariable("x", -kInfinity, kInfinity);
  m.AddConstraint("lo", {{x, 1.0}}, Relation::kGreaterEqual, 2.0);
  m.AddConstraint("hi", {{x, 1.0}}, Relation::kLessEqual, 1.0);
  m.SetObjective({{x, 1.0}});
  EXPECT_EQ(SolveLp(m).status, LpStatus::kInfeasible);
}

TEST(SimplexTest, FreeDirectionIsUnbounded) {
  MilpModel m;
  const int x = m.AddVariable("x", 0.0, kInfinity);
  const int y = m.AddVariable("y", 0.0, 1.0);
  m.AddConstraint("r", {{x, -1.0}, {y, 1.0}}, Relation::kLessEqual, 0.0);
  m.SetObjective({{x, 1.0}});
  EXPECT_EQ(SolveLp(m).status, LpStatus::kUnbounded);
}

TEST(SimplexTest, EqualityRowsAndNegativeRhs) {
  // max x + 2y  s.t. x + y = 4, x - y >= -2, x in [0, 5], y in [0, 5].
  MilpModel m;
  const int x = m.AddVariable("x", 0.0, 5.0);
  const int y = m.AddVariable("y", 0.0, 5.0);
  m.AddConstraint("sum", {{x, 1.0}, {y, 1.0}}, Relation::kEqual, 4.0);
  m.AddConstraint("diff", {{x, 1.0}, {y, -1.0}}, Relation::kGreaterEqual, -2.0);
  m.SetObjective({{x, 1.0}, {y, 2.0}});
  const LpResult r = SolveLp(m);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.values[x], 1.0, 1e-9);
  EXPECT_NEAR(r.values[y], 3.0, 1e-9);
  EXPECT_NEAR(r.objective, 7.0, 1e-9);
}

TEST(SimplexTest, BoundOverridesApply) {
  MilpModel m;
  const int x = m.AddVariable("x", 0.0, 10.0);
  m.SetObjective({{x, -1.0}});
  const std::vector<BoundOverride> overlay{{x, 2.5, 4.0}};
  const LpResult r = SolveLp(m, overlay);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(r.values[x], 2.5);
}

TEST(SimplexTest, MatchesVertexEnumerationOnRandomLps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 3;
    const int rows = 1 + trial % 5;
    Eigen::MatrixXd a(rows, n);
    Eigen::VectorXd b(rows), c(n), lo(n), hi(n);
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < n; ++k) a(r, k) = u(rng);
      b[r] = u(rng) * 0.5;
    }
    for (int k = 0; k < n; ++k) {
      c[k] = u(rng);
      lo[k] = -1.0 - std::abs(u(rng));
      hi[k] = 1.0 + std::abs(u(rng));
    }
    const auto expected = testing::VertexEnumerationMax(a, b, c, lo, hi);
    const LpResult r = SolveLp(FromDense(a, b, c, lo, hi));
    if (!expected) {
      EXPECT_EQ(r.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(r.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, *expected, 1e-7) << "trial " << trial;
    EXPECT_GE(r.bound, r.objective - 1e-9);
    EXPECT_LE(r.bound, *expected + 1e-6);
  }
  EXPECT_GT(feasible, 100);
}

TEST(SimplexTest, WarmResolveAgreesWithColdSolve) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6;
    const int rows = 5;
    Eigen::MatrixXd a(rows, n);
    Eigen::VectorXd b(rows), c(n), lo(n), hi(n);
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < n; ++k) a(r, k) = u(rng);
      b[r] = std::abs(u(rng));
    }
    for (int k = 0; k < n; ++k) {
      c[k] = u(rng);
      lo[k] = -1.0;
      hi[k] = 1.0;
    }
    const MilpModel model = FromDense(a, b, c, lo, hi);
    SimplexSolver warm(model);
    std::vector<double> l(lo.data(), lo.data() + n), h(hi.data(), hi.data() + n);
    ASSERT_EQ(warm.Solve(l, h).status, LpStatus::kOptimal);
    for (int step = 0; step < 8; ++step) {
      const int k = static_cast<int>(rng() % n);
      const double mid = 0.5 * u(rng);
      if (rng() % 2) {
        l[k] = -1.0;
        h[k] = mid;
      } else {
        l[k] = mid;
        h[k] = 1.0;
      }
      const LpResult hot = warm.Resolve(l, h);
      SimplexSolver fresh(model);
      const LpResult cold = fresh.Solve(l, h);
      ASSERT_EQ(hot.status, cold.status) << "trial " << trial << " step " << step;
      if (cold.status == LpStatus::kOptimal) {
        EXPECT_NEAR(hot.objective, cold.objective, 1e-8);
      }
    }
  }
}

TEST(SimplexTest, DegenerateProblemTerminates) {
  // Many redundant rows through the optimum vertex.
  MilpModel m;
  const int x = m.AddVariable("x", 0.0, kInfinity);
  const int y = m.AddVariable("y", 0.0, kInfinity);
  for (int r = 1; r <= 20; ++r) {
    m.AddConstraint("r" + std::to_string(r), {{x, 1.0 * r}, {y, 1.0}}, Relation::kLessEqual,
                    1.0 * r);
    m.AddConstraint("s" + std::to_string(r), {{x, 1.0}, {y, 1.0 * r}}, Relation::kLessEqual,
                    1.0 * r);
  }
  m.SetObjective({{x, 1.0}, {y, 1.0}});
  const LpResult r = SolveLp(m);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 1.0, 1e-9);
}

TEST(SimplexTest, ExpiredDeadlineStopsImmediately) {
  MilpModel m;
  const int x = m.AddVariable("x", 0.0, 1.0);
  m.AddConstraint("r", {{x, 1.0}}, Relation::kGreaterEqual, 0.5);
  m.SetObjective({{x, 1.0}});
  const auto past = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  EXPECT_EQ(SolveLp(m, {}, {}, past).status, LpStatus::kTimeLimit);
}

}  // namespace
}  // namespace nnsur
