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

#include "nnsur/branch_and_bound.h"

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nnsur/bounds.h"
#include "nnsur/encoder.h"
#include "oracles.h"

namespace nnsur {
namespace {

SolverConfig Config(bool warm, Emphasis emphasis = Emphasis::kBalanced) {
  SolverConfig c;
  c.time_limit_seconds = 60.0;
  c.warm_start = warm;
  c.emphasis = emphasis;
  return c;
}

TEST(BranchAndBoundTest, AllStableSolvesAtRoot) {
  // Positive weights and biases on [0, 1]: every hidden neuron is active.
  Network net = RandomInit(std::vector<int>{2, 3, 1}, 3, Box::Uniform(2, 0.0, 1.0));
  for (auto& w : net.weights) w = w.cwiseAbs();
  for (auto& b : net.biases) b.setConstant(0.1);
  const EncodedProblem p = EncodeFm(net);
  ASSERT_EQ(p.model.num_binaries(), 0);
  const SolveOutcome out = BranchAndBound(p.model, Config(true));
  EXPECT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_EQ(out.stats.nodes_explored, 1);
  EXPECT_NEAR(out.best_objective, Evaluate(net, Eigen::Vector2d(1.0, 1.0))[0], 1e-9);
}

class OracleTest : public ::testing::TestWithParam<bool> {};

TEST_P(OracleTest, TinyFmMatchesPatternEnumeration) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const std::vector<int> dims = seed % 2 ? std::vector<int>{2, 3, 1}
                                           : std::vector<int>{3, 4, 3, 1};
    const Network net = RandomInit(dims, seed);
    const auto oracle = testing::PatternEnumerationMax(net, net.domain);
    const EncodedProblem p = EncodeFm(net);
    const SolveOutcome out = BranchAndBound(p.model, Config(GetParam()));
    ASSERT_EQ(out.status, SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_NEAR(out.best_objective, oracle.optimum, 1e-5) << "seed " << seed;
    EXPECT_GE(out.best_bound, out.best_objective);
    EXPECT_LE(out.gap(), 1e-6 + 1e-12);
    // The objective is a genuine network value.
    const Eigen::VectorXd x = ExtractInput(p, out.best_values);
    EXPECT_NEAR(Evaluate(net, x)[0], out.best_objective, 1e-5);
  }
}

INSTANTIATE_TEST_SUITE_P(WarmAndCold, OracleTest, ::testing::Bool());

TEST(BranchAndBoundTest, StopOnFirstIncumbent) {
  const Network net = RandomInit(std::vector<int>{3, 6, 1}, 5);
  const EncodedProblem p = EncodeFm(net);
  int calls = 0;
  const SolveOutcome out = BranchAndBound(p.model, Config(true),
                                          [&](std::span<const double>, double) {
                                            ++calls;
                                            return CallbackAction::kStop;
                                          });
  EXPECT_EQ(out.status, SolveStatus::kStoppedByCallback);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(out.pool.size(), 1u);
  EXPECT_GE(out.best_bound, out.best_objective);
}

TEST(BranchAndBoundTest, CallbackSeesPoolInDiscoveryOrder) {
  const Network net = RandomInit(std::vector<int>{4, 8, 8, 1}, 9);
  const EncodedProblem p = EncodeFm(net);
  std::vector<std::vector<double>> seen;
  const SolveOutcome out = BranchAndBound(p.model, Config(true, Emphasis::kFeasibility),
                                          [&](std::span<const double> v, double) {
                                            seen.emplace_back(v.begin(), v.end());
                                            return CallbackAction::kContinue;
                                          });
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  ASSERT_EQ(out.pool.size(), seen.size());
  for (size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(out.pool[i].values, seen[i]);
  for (size_t i = 0; i < seen.size(); ++i) {
    for (size_t k = i + 1; k < seen.size(); ++k) EXPECT_NE(seen[i], seen[k]);
  }
}

TEST(BranchAndBoundTest, PoolKeepsBestWhenFull) {
  const Network net = RandomInit(std::vector<int>{4, 8, 8, 1}, 9);
  const EncodedProblem p = EncodeFm(net);
  SolverConfig c = Config(true, Emphasis::kFeasibility);
  c.pool_size = 2;
  std::vector<double> objectives;
  const SolveOutcome out = BranchAndBound(p.model, c, [&](std::span<const double>, double o) {
    objectives.push_back(o);
    return CallbackAction::kContinue;
  });
  ASSERT_GE(objectives.size(), 2u);
  ASSERT_EQ(out.pool.size(), 2u);
  std::sort(objectives.rbegin(), objectives.rend());
  double pool_max = std::max(out.pool[0].objective, out.pool[1].objective);
  EXPECT_EQ(pool_max, objectives[0]);
}

TEST(BranchAndBoundTest, DeterministicAcrossRuns) {
  const Network net = RandomInit(std::vector<int>{4, 8, 8, 1}, 21);
  const EncodedProblem p = EncodeFm(net);
  const SolveOutcome a = BranchAndBound(p.model, Config(true));
  const SolveOutcome b = BranchAndBound(p.model, Config(true));
  EXPECT_EQ(a.stats.nodes_explored, b.stats.nodes_explored);
  ASSERT_EQ(a.pool.size(), b.pool.size());
  for (size_t i = 0; i < a.pool.size(); ++i) EXPECT_EQ(a.pool[i].values, b.pool[i].values);
}

TEST(BranchAndBoundTest, NodeLogHasOneLinePerImprovement) {
  const Network net = RandomInit(std::vector<int>{4, 8, 8, 1}, 2);
  const EncodedProblem p = EncodeFm(net);
  std::ostringstream log;
  SolverConfig c = Config(true);
  c.node_log = &log;
  const SolveOutcome out = BranchAndBound(p.model, c);
  std::istringstream lines(log.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "wall_time,objective,bound,nodes");
  int count = 0;
  double last = -kInfinity;
  while (std::getline(lines, line)) {
    ++count;
    const double objective = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GT(objective, last);
    last = objective;
  }
  EXPECT_GE(count, 1);
  EXPECT_EQ(last, out.best_objective);
}

TEST(BranchAndBoundTest, InfeasibleModel) {
  MilpModel m;
  const int z = m.AddBinary("z");
  const int x = m.AddVariable("x", 0.0, 1.0);
  m.AddConstraint("a", {{x, 1.0}, {z, 1.0}}, Relation::kGreaterEqual, 2.5);
  m.SetObjective({{x, 1.0}});
  const SolveOutcome out = BranchAndBound(m, Config(false));
  EXPECT_EQ(out.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(out.has_incumbent());
}

TEST(BranchAndBoundTest, ZeroTimeLimitReportsTimeout) {
  const Network net = RandomInit(std::vector<int>{4, 8, 1}, 1);
  const EncodedProblem p = EncodeFm(net);
  SolverConfig c = Config(true);
  c.time_limit_seconds = 0.0;
  const SolveOutcome out = BranchAndBound(p.model, c);
  EXPECT_EQ(out.status, SolveStatus::kTimeoutNoIncumbent);
  EXPECT_EQ(out.stats.nodes_explored, 0);
}

TEST(RoundingHeuristicTest, IntegralPointIsReturnedUnchanged) {
  const Network net = RandomInit(std::vector<int>{3, 5, 1}, 4);
  const EncodedProblem p = EncodeFm(net);
  const Eigen::Vector3d x(0.2, -0.4, 0.7);
  const std::vector<double> exact = AssignmentFromInput(p, net, x, nullptr);
  const auto rounded = RoundingHeuristic(p.model, exact);
  ASSERT_TRUE(rounded.has_value());
  EXPECT_EQ(*rounded, exact);
}

TEST(RoundingHeuristicTest, AnyInputGivesFeasibleFmPoint) {
  const Network net = RandomInit(std::vector<int>{3, 5, 5, 1}, 8);
  const EncodedProblem p = EncodeFm(net);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(p.model.num_variables(), 0.5);
    Eigen::Vector3d x(u(rng), u(rng), u(rng));
    for (int k = 0; k < 3; ++k) values[p.encoding.inputs[k]] = x[k];
    const auto point = RoundingHeuristic(p.model, values);
    ASSERT_TRUE(point.has_value());
    EXPECT_NEAR(p.model.ObjectiveValue(*point), Evaluate(net, x)[0], 1e-12);
  }
}

TEST(RoundingHeuristicTest, NeverBeatsProvenOptimum) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Network net = RandomInit(std::vector<int>{3, 6, 6, 1}, 100 + seed);
    const EncodedProblem p = EncodeFm(net);
    std::vector<double> heuristic_values;
    const SolveOutcome out = BranchAndBound(p.model, Config(true, Emphasis::kFeasibility),
                                            [&](std::span<const double>, double o) {
                                              heuristic_values.push_back(o);
                                              return CallbackAction::kContinue;
                                            });
    ASSERT_EQ(out.status, SolveStatus::kOptimal);
    for (double v : heuristic_values) EXPECT_LE(v, out.best_objective + 1e-12);
  }
}

}  // namespace
}  // namespace nnsur
