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

// LP-based branch-and-bound over the binary variables of a MilpModel.
//
// Every distinct integral feasible point the search meets (integral node LP
// solutions and rounding-heuristic points alike) is handed to the callback in
// discovery order. The callback may stop the search.

#ifndef NNSUR_BRANCH_AND_BOUND_H_
#define NNSUR_BRANCH_AND_BOUND_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnsur/milp_model.h"
#include "nnsur/simplex.h"

namespace nnsur {

enum class Emphasis { kBalanced, kFeasibility };
enum class NodeOrder { kBestBound, kDepthFirstHybrid };

enum class SolveStatus {
  kOptimal,
  kFeasible,            // time limit reached with an incumbent
  kInfeasible,
  kTimeoutNoIncumbent,
  kStoppedByCallback,
};

std::string ToString(Emphasis emphasis);
std::string ToString(NodeOrder order);
std::string ToString(SolveStatus status);
Emphasis ParseEmphasis(const std::string& text);
NodeOrder ParseNodeOrder(const std::string& text);

struct SolverConfig {
  double time_limit_seconds = 300.0;
  double gap_tolerance = 1e-6;  // relative
  double integrality_tolerance = 1e-6;
  int pool_size = 1000;
  // kFeasibility branches z = 1 first and runs the rounding heuristic at
  // every node; kBalanced branches z = 0 first and rounds at the root and
  // every 16th node.
  Emphasis emphasis = Emphasis::kBalanced;
  NodeOrder node_order = NodeOrder::kDepthFirstHybrid;
  // Carried into run metadata. The search itself has no random choices.
  uint64_t seed = 0;
  bool warm_start = true;
  bool rounding_heuristic = true;
  SimplexOptions lp;
  // CSV lines "wall_time,objective,bound,nodes", one per improving incumbent.
  std::ostream* node_log = nullptr;
};

struct Incumbent {
  std::vector<double> values;
  double objective = 0.0;
  int64_t node = 0;
  double wall_time = 0.0;
};

struct SolveStatistics {
  int64_t nodes_explored = 0;
  int64_t lps_solved = 0;
  int64_t lp_iterations = 0;
  int64_t incumbents_found = 0;
  int64_t heuristic_incumbents = 0;
  int64_t cold_fallbacks = 0;
  int max_depth = 0;
  double wall_time = 0.0;
  // Longest uninterruptible LP stretch (see SimplexSolver).
  double max_lp_iteration_seconds = 0.0;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kTimeoutNoIncumbent;
  double best_objective = -kInfinity;
  double best_bound = kInfinity;
  std::vector<double> best_values;  // empty without an incumbent
  std::vector<Incumbent> pool;      // discovery order
  SolveStatistics stats;

  bool has_incumbent() const { return !best_values.empty(); }
  double gap() const;
};

enum class CallbackAction { kContinue, kStop };

// Called once per new integral feasible solution, on the search thread.
using IncumbentCallback =
    std::function<CallbackAction(std::span<const double> values, double objective)>;

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int64_t node, int depth)
      : std::runtime_error(what), node_(node), depth_(depth) {}
  int64_t node() const { return node_; }
  int depth() const { return depth_; }

 private:
  int64_t node_;
  int depth_;
};

// Turns a node LP solution into a full feasible point. An LP point whose
// binaries are already integral is returned with the binaries snapped;
// otherwise every defined variable is recomputed from the LP's free
// variables with ReLU indicators set from the sign of the pre-activation.
// Returns nullopt when the result violates the model by more than
// `tolerance`.
std::optional<std::vector<double>> RoundingHeuristic(
    const MilpModel& model, std::span<const double> lp_values,
    double integrality_tolerance = 1e-6, double tolerance = 1e-6);

SolveOutcome BranchAndBound(const MilpModel& model, const SolverConfig& config,
                            const IncumbentCallback& callback = {});

}  // namespace nnsur

#endif  // NNSUR_BRANCH_AND_BOUND_H_
