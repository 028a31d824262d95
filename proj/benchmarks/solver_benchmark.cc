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

#include <random>

#include <benchmark/benchmark.h>

#include "nnsur/bounds.h"
#include "nnsur/branch_and_bound.h"
#include "nnsur/encoder.h"
#include "nnsur/network.h"
#include "nnsur/pruning.h"
#include "nnsur/simplex.h"

namespace nnsur {
namespace {

Network Net(int n0, int width, int depth, int outputs, uint64_t seed) {
  std::vector<int> dims{n0};
  for (int l = 0; l < depth; ++l) dims.push_back(width);
  dims.push_back(outputs);
  return RandomInit(dims, seed);
}

void BM_Forward(benchmark::State& state) {
  const Network net = Net(static_cast<int>(state.range(0)), 64, 2, 10, 0);
  const Eigen::VectorXd x = net.domain.Midpoint();
  for (auto _ : state) benchmark::DoNotOptimize(Evaluate(net, x));
}
BENCHMARK(BM_Forward)->Arg(36)->Arg(324)->Arg(784);

void BM_IntervalPropagate(benchmark::State& state) {
  const Network net = Net(static_cast<int>(state.range(0)), 64, 4, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(IntervalPropagate(net));
}
BENCHMARK(BM_IntervalPropagate)->Arg(100)->Arg(1000);

void BM_RootRelaxation(benchmark::State& state) {
  const Network net = Net(static_cast<int>(state.range(0)), 16, 2, 1, 1);
  const EncodedProblem p = EncodeFm(net);
  for (auto _ : state) benchmark::DoNotOptimize(SolveLp(p.model));
  state.counters["rows"] = p.model.num_constraints();
  state.counters["binaries"] = p.model.num_binaries();
}
BENCHMARK(BM_RootRelaxation)->Arg(8)->Arg(36)->Unit(benchmark::kMillisecond);

void BM_WarmResolve(benchmark::State& state) {
  const Network net = Net(20, 16, 2, 1, 2);
  const EncodedProblem p = EncodeFm(net);
  SimplexSolver solver(p.model);
  std::vector<double> lo, hi;
  for (const Variable& v : p.model.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  solver.Solve(lo, hi);
  const std::vector<int> binaries = p.model.binary_indices();
  std::mt19937_64 rng(0);
  for (auto _ : state) {
    std::vector<double> l = lo, h = hi;
    const int z = binaries[rng() % binaries.size()];
    (rng() & 1 ? l : h)[z] = rng() & 1 ? 1.0 : 0.0;
    if (l[z] > h[z]) std::swap(l[z], h[z]);
    benchmark::DoNotOptimize(solver.Resolve(l, h));
  }
}
BENCHMARK(BM_WarmResolve)->Unit(benchmark::kMicrosecond);

void BM_BranchAndBoundFm(benchmark::State& state) {
  const Network dense = Net(8, static_cast<int>(state.range(0)), 2, 1, 3);
  const EncodedProblem p = EncodeFm(dense);
  SolverConfig config;
  config.time_limit_seconds = 60.0;
  config.warm_start = state.range(1) != 0;
  int64_t nodes = 0;
  for (auto _ : state) nodes = BranchAndBound(p.model, config).stats.nodes_explored;
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_BranchAndBoundFm)
    ->Args({8, 1})
    ->Args({8, 0})
    ->Args({12, 1})
    ->Args({12, 0})
    ->Unit(benchmark::kMillisecond);

void BM_PrunedFm(benchmark::State& state) {
  const Network dense = Net(8, 12, 2, 1, 3);
  PruningSpec spec;
  spec.rate = static_cast<double>(state.range(0)) / 100.0;
  const EncodedProblem p = EncodeFm(Prune(dense, spec, nullptr));
  SolverConfig config;
  config.time_limit_seconds = 60.0;
  for (auto _ : state) benchmark::DoNotOptimize(BranchAndBound(p.model, config));
  state.counters["binaries"] = p.model.num_binaries();
}
BENCHMARK(BM_PrunedFm)->Arg(0)->Arg(50)->Arg(80)->Arg(95)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace nnsur

BENCHMARK_MAIN();
