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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and sizes are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nnsur/bounds.h"
#include "nnsur/branch_and_bound.h"
#include "nnsur/config.h"
#include "nnsur/encoder.h"
#include "nnsur/pruning.h"
#include "nnsur/study.h"
#include "nnsur/summary.h"
#include "nnsur/surrogate.h"
#include "oracles.h"

namespace nnsur {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kOracleTolerance = 1e-5;      // criteria 1 and 7
constexpr double kRowTolerance = 1e-6;         // criterion 2
constexpr double kBallSlack = 1e-6;            // criterion 3
constexpr double kMarginFloor = 1e-9;          // criterion 3
constexpr int kMonteCarloSamples = 10000;      // criterion 6
constexpr double kTrendShare = 50.0;           // criterion 8, percent
constexpr double kPublishedShare = 89.4;           // reported alongside criterion 8
constexpr double kShortLimit = 2.0;            // criterion 10, seconds

constexpr char kDeskStudy[] = R"(
study = "verification"
seeds = [0, 1, 2, 3, 4, 5, 6, 7]
time_limit = 60.0
workers = 1

[network]
input_sizes = [36, 64]
depths = [2]
widths = [16, 32]
classes = 10

[[dataset]]
name = "blobs"
source = "synthetic"

[pruning]
methods = ["mp"]
granularities = ["unstructured"]
rates = [0.8]
finetune = [false]
)";

constexpr char kRerunVerification[] = R"(
study = "verification"
seeds = [0, 1, 2, 3]
time_limit = 60.0
workers = 1

[network]
input_sizes = [16, 25]
depths = [2]
widths = [8]
classes = 4

[[dataset]]
name = "blobs"
source = "synthetic"
train_samples = 200
test_samples = 50

[pruning]
rates = [0.5, 0.9]
finetune = [false, true]
epochs_per_round = 1
)";

constexpr char kRerunMaximization[] = R"(
study = "maximization"
seeds = [0, 1, 2]
time_limit = 60.0
workers = 1

[network]
input_sizes = [5, 8]
depths = [2]
widths = [6]

[pruning]
methods = ["mp", "rp"]
granularities = ["unstructured", "structured"]
rates = [0.5]
)";

struct Check {
  bool pass = false;
  std::string detail;
};

// Matrix-vector products written out, independent of Evaluate().
std::vector<double> LoopForward(const Network& net, const Eigen::VectorXd& x) {
  std::vector<double> h(x.data(), x.data() + x.size());
  for (int l = 0; l < net.layer_count(); ++l) {
    std::vector<double> g(net.dims[l + 1]);
    for (int i = 0; i < net.dims[l + 1]; ++i) {
      double s = net.biases[l][i];
      for (int k = 0; k < net.dims[l]; ++k) s += net.weights[l](i, k) * h[k];
      g[i] = net.is_output_layer(l) ? s : std::max(s, 0.0);
    }
    h = std::move(g);
  }
  return h;
}

Eigen::VectorXd SampleBox(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(box.size());
  for (int k = 0; k < box.size(); ++k) {
    x[k] = box.lower[k] + u(rng) * (box.upper[k] - box.lower[k]);
  }
  return x;
}

// 4-6-6-1 on [-1, 1]^4 with small random biases, so at most 12 unstable
// neurons.
Network OracleNet(uint64_t seed) {
  Network net = RandomInit(std::vector<int>{4, 6, 6, 1}, seed);
  std::mt19937_64 rng(seed ^ 0x5eed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& b : net.biases) {
    for (auto& v : b) v = u(rng);
  }
  return net;
}

SolverConfig ExactSolver(Emphasis emphasis = Emphasis::kBalanced) {
  SolverConfig c;
  c.time_limit_seconds = 120.0;
  c.emphasis = emphasis;
  return c;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string NonTiming(const CsvTable& table) {
  std::ostringstream out;
  WriteCsvRow(out, table.header);
  for (CsvRow row : table.rows) {
    for (size_t c = 0; c < table.header.size(); ++c) {
      const std::string& name = table.header[c];
      if (name.size() >= 4 && name.compare(name.size() - 4, 4, "time") == 0) row[c].clear();
    }
    WriteCsvRow(out, row);
  }
  return out.str();
}

Check EncodingExactness() {
  int mismatches = 0, not_optimal = 0, max_unstable = 0, patterns = 0;
  double worst = 0.0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Network net = OracleNet(seed);
    int unstable = 0;
    for (const auto& s : StabilitySummary(IntervalPropagate(net))) unstable += s.unstable;
    max_unstable = std::max(max_unstable, unstable);
    const auto oracle = testing::PatternEnumerationMax(net, net.domain);
    patterns += oracle.patterns;
    const SolveOutcome out = BranchAndBound(EncodeFm(net).model, ExactSolver());
    if (out.status != SolveStatus::kOptimal) {
      ++not_optimal;
      continue;
    }
    const double diff = std::abs(out.best_objective - oracle.optimum);
    worst = std::max(worst, diff);
    if (diff > kOracleTolerance) ++mismatches;
  }
  return {mismatches == 0 && not_optimal == 0 && max_unstable <= 12,
          fmt::format("100 nets, max unstable {}, {} patterns, max |diff| {:.2e}, "
                      "{} mismatches, {} not optimal",
                      max_unstable, patterns, worst, mismatches, not_optimal)};
}

Check ForwardConsistency() {
  std::mt19937_64 rng(11);
  const std::vector<std::vector<int>> shapes{
      {4, 6, 6, 1}, {8, 16, 16, 10}, {36, 16, 16, 10}, {5, 12, 12, 12, 1}};
  double worst = 0.0;
  for (uint64_t t = 0; t < 100; ++t) {
    const std::vector<int>& dims = shapes[t % shapes.size()];
    const Network net = RandomInit(dims, 1000 + t);
    const Eigen::VectorXd x0 = SampleBox(net.domain, rng);
    if (dims.back() == 1) {
      const EncodedProblem p = EncodeFm(net);
      worst = std::max(worst, p.model.MaxViolation(AssignmentFromInput(p, net, x0)));
    } else {
      const double eps = 0.05 * dims.front();
      Eigen::VectorXd step = SampleBox(net.domain, rng) - x0;
      const Eigen::VectorXd x = x0 + eps * step / std::max(1.0, step.lpNorm<1>());
      const EncodedProblem p = EncodeVnn(net, x0, eps, 0, 1);
      worst = std::max(worst, p.model.MaxViolation(AssignmentFromInput(p, net, x, &x0)));
    }
  }
  return {worst <= kRowTolerance, fmt::format("100 pairs, max violation {:.2e}", worst)};
}

Check Completeness() {
  int found = 0, optimum_mismatch = 0;
  std::vector<std::string> misses;
  for (int i = 0; i < 20; ++i) {
    std::mt19937_64 rng(500 + i);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 2 + i % 5;
    // Hidden pair per input: relu(x - 0.5) and relu(0.5 - x), both unstable
    // on [0, 1]; y_1 = a . x exactly, y_0 = c.
    Eigen::VectorXd a(n), x0(n);
    for (int k = 0; k < n; ++k) {
      a[k] = 0.5 + u(rng);
      x0[k] = 0.2 + 0.4 * u(rng);
    }
    const double eps = 0.1 + 0.2 * u(rng);
    const double a_max = a.maxCoeff();
    const double c = a.dot(x0) + 0.5 * eps * a_max;
    const double optimum = 0.5 * eps * a_max;
    Network net;
    net.dims = {n, 2 * n, 2};
    net.weights = {Eigen::MatrixXd::Zero(2 * n, n), Eigen::MatrixXd::Zero(2, 2 * n)};
    net.biases = {Eigen::VectorXd(2 * n), Eigen::VectorXd(2)};
    for (int k = 0; k < n; ++k) {
      net.weights[0](2 * k, k) = 1.0;
      net.biases[0][2 * k] = -0.5;
      net.weights[0](2 * k + 1, k) = -1.0;
      net.biases[0][2 * k + 1] = 0.5;
      net.weights[1](1, 2 * k) = a[k];
      net.weights[1](1, 2 * k + 1) = -a[k];
    }
    net.biases[1] << c, 0.5 * a.sum();
    net.domain = Box::Uniform(n, 0.0, 1.0);

    const VerificationInstance inst(net, x0, eps, 0, 1);
    const SurrogateResult r = VerifyDirect(inst, ExactSolver());
    const bool ok = r.outcome == SurrogateOutcome::kAdversarialFound && r.x &&
                    (*r.x - x0).lpNorm<1>() <= eps + kBallSlack &&
                    LoopForward(net, *r.x)[1] - LoopForward(net, *r.x)[0] > kMarginFloor;
    if (ok) {
      ++found;
    } else {
      misses.push_back(fmt::format("{}:{}/{}", i, ToString(r.outcome), ToString(r.solver_status)));
    }
    const SolveOutcome full = BranchAndBound(EncodeVnn(net, x0, eps, 0, 1).model, ExactSolver());
    if (full.status != SolveStatus::kOptimal ||
        std::abs(full.best_objective - optimum) > kOracleTolerance) {
      ++optimum_mismatch;
    }
  }
  return {found == 20 && optimum_mismatch == 0,
          fmt::format("{}/20 adversarial found, {} analytic-optimum mismatches{}", found,
                      optimum_mismatch,
                      misses.empty() ? "" : fmt::format(" [{}]", fmt::join(misses, " ")))};
}

std::vector<int64_t> SmallestIndices(const Eigen::MatrixXd& w, int64_t count) {
  std::vector<std::pair<double, int64_t>> entries;
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      entries.emplace_back(std::abs(w(i, j)), static_cast<int64_t>(i) * w.cols() + j);
    }
  }
  std::sort(entries.begin(), entries.end());
  std::vector<int64_t> out;
  for (int64_t k = 0; k < count; ++k) out.push_back(entries[k].second);
  std::sort(out.begin(), out.end());
  return out;
}

Check PruningExactness() {
  const double rates[] = {0.3, 0.5, 0.8, 0.9, 0.95};
  const std::vector<std::vector<int>> shapes{{36, 32, 16, 10}, {20, 12, 1}, {8, 64, 64, 3}};
  int checks = 0, failures = 0;
  const auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  const Dataset data = MakeSyntheticClassification(8, 3, 90, 4);
  for (size_t s = 0; s < shapes.size(); ++s) {
    const Network net = RandomInit(shapes[s], 40 + s);
    for (double rate : rates) {
      const int64_t layers = net.layer_count();
      const Mask mp = MagnitudeMask(net, rate);
      const Network pruned = ApplyMask(net, mp);
      const Mask rp = RandomMask(net, rate, 3);
      for (int l = 0; l < layers; ++l) {
        const int64_t count = net.weights[l].size();
        const auto target = static_cast<int64_t>(std::floor(rate * count + 1e-9));
        expect((pruned.weights[l].array() == 0.0).count() == target);
        expect(mp.masked_count(l) == target);
        expect(rp.masked_count(l) == target);
        std::vector<int64_t> masked;
        for (int i = 0; i < mp.weights[l].rows(); ++i) {
          for (int j = 0; j < mp.weights[l].cols(); ++j) {
            if (mp.weights[l](i, j) == 0) masked.push_back(int64_t{i} * mp.weights[l].cols() + j);
          }
        }
        expect(masked == SmallestIndices(net.weights[l], target));
      }
      const Mask st = StructuredMask(net, rate, PruneMethod::kMagnitude, 0);
      for (int h = 0; h + 1 < layers; ++h) {
        expect(st.dead_count(h) ==
               static_cast<int>(std::floor(rate * net.dims[h + 1] + 1e-9)));
      }
    }
  }
  // Finetuned nets keep masked positions at exactly zero.
  const Network small = RandomInit(std::vector<int>{8, 16, 16, 3}, 9, data.box);
  for (double rate : rates) {
    for (Granularity g : {Granularity::kUnstructured, Granularity::kStructured}) {
      PruningSpec spec;
      spec.rate = rate;
      spec.granularity = g;
      spec.finetune = FinetuneSchedule{};
      spec.finetune->epochs_per_round = 1;
      const PruneResult r = PruneDetailed(small, spec, &data);
      const Network masked = g == Granularity::kUnstructured ? r.network : MaskedNetwork(small, r.mask);
      if (g == Granularity::kUnstructured) {
        for (int l = 0; l < small.layer_count(); ++l) {
          expect(((r.mask.weights[l].array() == 0).cast<double>() *
                  r.network.weights[l].array().abs())
                     .maxCoeff() == 0.0);
          expect(r.mask.masked_count(l) == PruneTarget(rate, small.weights[l].size()));
        }
      } else {
        for (int h = 0; h + 1 < small.layer_count(); ++h) {
          expect(r.network.dims[h + 1] == 16 - PruneTarget(rate, 16));
        }
      }
      expect(masked.nonzero_weight_count() <= small.weight_count());
    }
  }
  return {failures == 0, fmt::format("{} checks, {} failed", checks, failures)};
}

Check BoundSoundness() {
  std::mt19937_64 rng(6);
  const std::vector<std::vector<int>> shapes{{5, 8, 8, 3}, {10, 16, 16, 1}, {4, 6, 6, 6, 2}};
  int64_t escapes = 0, checked = 0;
  for (uint64_t n = 0; n < 20; ++n) {
    const Network net = RandomInit(shapes[n % shapes.size()], 200 + n);
    const ActivationBounds b = IntervalPropagate(net);
    for (int t = 0; t < kMonteCarloSamples; ++t) {
      const LayerActivations act = Forward(net, SampleBox(net.domain, rng));
      for (int l = 0; l < net.layer_count(); ++l) {
        escapes += (act.pre[l].array() < b.pre_lo[l].array()).count();
        escapes += (act.pre[l].array() > b.pre_hi[l].array()).count();
        checked += act.pre[l].size();
      }
    }
  }
  return {escapes == 0,
          fmt::format("20 nets x {} samples, {} pre-activations, {} outside", kMonteCarloSamples,
                      checked, escapes)};
}

Check AlgorithmContracts() {
  int value_mismatch = 0, trace_breaks = 0, oracle_mismatch = 0, not_optimal = 0, runs = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Network dense = RandomInit(std::vector<int>{6, 12, 12, 1}, 300 + seed);
    for (double rate : {0.5, 0.8, 0.95}) {
      PruningSpec spec;
      spec.rate = rate;
      const Network sparse = Prune(dense, spec, nullptr);
      const SurrogateResult r =
          MaximizeViaSurrogate(dense, sparse, ExactSolver(Emphasis::kFeasibility));
      ++runs;
      if (!r.x || r.value != Evaluate(dense, *r.x)[0]) ++value_mismatch;
      if (!std::is_sorted(r.trace.begin(), r.trace.end())) ++trace_breaks;
    }
  }
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Network net = OracleNet(seed);
    const auto oracle = testing::PatternEnumerationMax(net, net.domain);
    const SurrogateResult r = MaximizeViaSurrogate(net, net, ExactSolver(Emphasis::kFeasibility));
    ++runs;
    if (r.solver_status != SolveStatus::kOptimal) {
      ++not_optimal;
      continue;
    }
    if (!r.x || r.value != Evaluate(net, *r.x)[0]) ++value_mismatch;
    if (!std::is_sorted(r.trace.begin(), r.trace.end())) ++trace_breaks;
    if (std::abs(r.value - oracle.optimum) > kOracleTolerance) ++oracle_mismatch;
  }
  return {value_mismatch == 0 && trace_breaks == 0 && oracle_mismatch == 0 && not_optimal == 0,
          fmt::format("{} runs, {} value mismatches, {} non-monotone traces, {} oracle "
                      "mismatches, {} not optimal",
                      runs, value_mismatch, trace_breaks, oracle_mismatch, not_optimal)};
}

struct DeskOutcome {
  Check soundness;
  Check trend;
};

DeskOutcome DeskStudy() {
  const ExperimentConfig config = ParseExperimentConfig(kDeskStudy, "desk study");
  int adversarial = 0, violations = 0;
  StudyOptions options;
  options.on_solve = [&](const SolveEvent& e) {
    if (e.result.outcome != SurrogateOutcome::kAdversarialFound) return;
    ++adversarial;
    const VerificationInstance& inst = *e.instance;
    const Eigen::VectorXd& x = *e.result.x;
    const std::vector<double> y = LoopForward(e.dense, x);
    double l1 = 0.0;
    for (int k = 0; k < x.size(); ++k) l1 += std::abs(x[k] - inst.x0()[k]);
    const bool ok = l1 <= inst.eps() + kBallSlack && y[inst.j_prime()] - y[inst.j()] > kMarginFloor &&
                    e.dense.domain.Contains(x);
    if (!ok) ++violations;
  };
  const StudyResult result = RunStudy(config, options);
  const size_t solved = result.instances.size() - result.skipped.size() - result.failures.size();

  DeskOutcome out;
  out.soundness = {violations == 0 && solved >= 30 && result.failures.empty(),
                   fmt::format("{} instances solved ({} skipped, {} failed), {} adversarial "
                               "inputs checked, {} violations",
                               solved, result.skipped.size(), result.failures.size(),
                               adversarial, violations)};

  const std::vector<Comparison> comparisons = ToComparisons(result.records);
  int wins = 0, losses = 0, ties = 0;
  std::vector<double> direct, surrogate;
  for (const Comparison& c : comparisons) {
    switch (Compare(c, false)) {
      case Verdict::kSurrogate: ++wins; break;
      case Verdict::kDirect: ++losses; break;
      case Verdict::kTie: ++ties; break;
    }
    direct.push_back(c.direct);
    surrogate.push_back(c.surrogate);
  }
  const double share = wins + losses > 0 ? 100.0 * wins / (wins + losses) : 0.0;
  const double med_direct = Median(direct);
  const double med_surrogate = Median(surrogate);
  out.trend = {solved >= 30 && wins + losses > 0 && share >= kTrendShare &&
                   med_surrogate <= med_direct,
               fmt::format("{} instances, surrogate faster in {:.1f}% of {} non-tied "
                           "(published: {}%), {} ties, median time surrogate {:.4f}s vs direct "
                           "{:.4f}s",
                           comparisons.size(), share, wins + losses, kPublishedShare, ties,
                           med_surrogate, med_direct)};
  return out;
}

Check Determinism() {
  std::vector<std::string> diffs;
  int rows = 0;
  for (const char* text : {kRerunVerification, kRerunMaximization}) {
    const ExperimentConfig config = ParseExperimentConfig(text, "rerun");
    const StudyResult a = RunStudy(config);
    const StudyResult b = RunStudy(config);
    rows += static_cast<int>(a.records.size());
    if (NonTiming(RecordsTable(a.records)) != NonTiming(RecordsTable(b.records))) {
      diffs.push_back(ToString(config.study) + " records");
    }
    if (NonTiming(RunsTable(a.runs)) != NonTiming(RunsTable(b.runs))) {
      diffs.push_back(ToString(config.study) + " runs");
    }
  }
  return {diffs.empty() && rows > 0,
          fmt::format("verification and maximization configs rerun, {} records compared{}",
                      rows, diffs.empty() ? "" : ", differ: " + fmt::format("{}", fmt::join(diffs, ", ")))};
}

Check TimeLimitCompliance() {
  std::vector<std::string> parts;
  bool pass = true;
  // A maximization that does not finish in 2 s on a single core, solved
  // directly and through a surrogate.
  const Network dense = RandomInit(std::vector<int>{20, 48, 48, 1}, 77);
  const Network sparse = Prune(dense, PruningSpec{.rate = 0.5}, nullptr);
  SolverConfig config;
  config.time_limit_seconds = kShortLimit;
  for (const Network* net : {&dense, &sparse}) {
    const EncodedProblem p = EncodeFm(*net);
    const auto start = Clock::now();
    const SolveOutcome out = BranchAndBound(p.model, config);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    const double over = elapsed - kShortLimit;
    const bool needed_longer = out.status != SolveStatus::kOptimal &&
                               out.status != SolveStatus::kInfeasible;
    const bool ok = needed_longer && over <= out.stats.max_lp_iteration_seconds;
    pass = pass && ok;
    parts.push_back(fmt::format("{} binaries: {} after {:.4f}s, overshoot {:.2e}s, longest LP "
                                "iteration {:.2e}s",
                                p.model.num_binaries(), ToString(out.status), elapsed, over,
                                out.stats.max_lp_iteration_seconds));
  }
  return {pass, fmt::format("{}", fmt::join(parts, "; "))};
}

}  // namespace
}  // namespace nnsur

int main() {
  using namespace nnsur;
  struct Entry {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  std::optional<DeskOutcome> desk;
  const auto desk_once = [&]() -> const DeskOutcome& {
    if (!desk) desk = DeskStudy();
    return *desk;
  };
  const std::vector<Entry> entries{
      {1, "encoding exactness", EncodingExactness},
      {2, "forward consistency", ForwardConsistency},
      {3, "verification soundness", [&] { return desk_once().soundness; }},
      {4, "verification completeness", Completeness},
      {5, "pruning exactness", PruningExactness},
      {6, "bound soundness", BoundSoundness},
      {7, "surrogate maximization contracts", AlgorithmContracts},
      {8, "directional trend", [&] { return desk_once().trend; }},
      {9, "determinism", Determinism},
      {10, "time-limit compliance", TimeLimitCompliance},
  };
  bool all = true;
  for (const Entry& e : entries) {
    const auto start = Clock::now();
    Check v;
    try {
      v = e.run();
    } catch (const std::exception& ex) {
      v = {false, fmt::format("exception: {}", ex.what())};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    all = all && v.pass;
    std::cout << fmt::format("criterion {:>2} {}: {} ({}; {:.1f}s)\n", e.id, v.pass ? "PASS" : "FAIL",
                             e.name, v.detail, seconds)
              << std::flush;
  }
  return all ? 0 : 1;
}
