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
#include <bit>
#include <chrono>
#include <cmath>
#include <queue>
#include <unordered_set>

#include <fmt/format.h>

namespace nnsur {

std::string ToString(Emphasis emphasis) {
  return emphasis == Emphasis::kFeasibility ? "feasibility" : "balanced";
}

std::string ToString(NodeOrder order) {
  return order == NodeOrder::kBestBound ? "best-bound" : "depth-first-hybrid";
}

std::string ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeoutNoIncumbent: return "timeout-no-incumbent";
    case SolveStatus::kStoppedByCallback: return "stopped-by-callback";
  }
  return "unknown";
}

Emphasis ParseEmphasis(const std::string& text) {
  if (text == "balanced") return Emphasis::kBalanced;
  if (text == "feasibility") return Emphasis::kFeasibility;
  throw std::invalid_argument(fmt::format("unknown emphasis '{}'", text));
}

NodeOrder ParseNodeOrder(const std::string& text) {
  if (text == "best-bound") return NodeOrder::kBestBound;
  if (text == "depth-first-hybrid") return NodeOrder::kDepthFirstHybrid;
  throw std::invalid_argument(fmt::format("unknown node order '{}'", text));
}

double SolveOutcome::gap() const {
  if (!has_incumbent()) return kInfinity;
  return (best_bound - best_objective) / std::max(1.0, std::abs(best_objective));
}

std::optional<std::vector<double>> RoundingHeuristic(const MilpModel& model,
                                                     std::span<const double> lp_values,
                                                     double integrality_tolerance,
                                                     double tolerance) {
  std::vector<double> values(lp_values.begin(), lp_values.end());
  bool integral = true;
  for (int b : model.binary_indices()) {
    const double rounded = std::round(values[b]);
    if (std::abs(values[b] - rounded) > integrality_tolerance) {
      integral = false;
      break;
    }
  }
  if (integral) {
    for (int b : model.binary_indices()) values[b] = std::round(values[b]);
    if (model.IsFeasible(values, tolerance)) return values;
    values.assign(lp_values.begin(), lp_values.end());
  }
  model.RunForwardSteps(values);
  if (model.IsFeasible(values, tolerance)) return values;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

// Rounding cadence under balanced emphasis.
constexpr int64_t kBalancedHeuristicPeriod = 16;

struct Node {
  int64_t id = 0;
  int depth = 0;
  double bound = kInfinity;
  std::vector<int8_t> fix;  // per binary: -1 free, 0 or 1 fixed
};

// Max-heap on bound; the older node wins ties.
struct NodeLess {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

uint64_t HashValues(std::span<const double> values) {
  uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    uint64_t bits = std::bit_cast<uint64_t>(v == 0.0 ? 0.0 : v);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xff;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

class Search {
 public:
  Search(const MilpModel& model, const SolverConfig& config,
         const IncumbentCallback& callback)
      : model_(model),
        config_(config),
        callback_(callback),
        lp_(model, config.lp),
        binaries_(model.binary_indices()),
        hybrid_(config.node_order == NodeOrder::kDepthFirstHybrid) {}

  SolveOutcome Run();

 private:
  double Elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  double Threshold() const {
    if (!outcome_.has_incumbent()) return -kInfinity;
    const double best = outcome_.best_objective;
    return best + std::max(1e-9, config_.gap_tolerance * std::max(1.0, std::abs(best)));
  }
  // Returns true when the callback asks to stop.
  bool Offer(std::vector<double> values, const Node& node, bool heuristic);
  double OpenBound() const;

  const MilpModel& model_;
  const SolverConfig& config_;
  const IncumbentCallback& callback_;
  SimplexSolver lp_;
  std::vector<int> binaries_;
  bool hybrid_;

  Clock::time_point start_;
  SolveOutcome outcome_;
  std::unordered_set<uint64_t> seen_;
  std::priority_queue<Node, std::vector<Node>, NodeLess> open_;
  std::optional<Node> next_;
  bool plunging_ = false;
  double closed_bound_ = -kInfinity;  // best bound among nodes closed without branching
};

bool Search::Offer(std::vector<double> values, const Node& node, bool heuristic) {
  if (!seen_.insert(HashValues(values)).second) return false;
  const double objective = model_.ObjectiveValue(values);
  ++outcome_.stats.incumbents_found;
  if (heuristic) ++outcome_.stats.heuristic_incumbents;
  const double now = Elapsed();

  if (!outcome_.has_incumbent() || objective > outcome_.best_objective) {
    outcome_.best_objective = objective;
    outcome_.best_values = values;
    if (hybrid_) plunging_ = true;
    if (config_.node_log != nullptr) {
      *config_.node_log << fmt::format("{},{},{},{}\n", now, objective,
                                       std::max(OpenBound(), objective),
                                       outcome_.stats.nodes_explored);
      config_.node_log->flush();
    }
  }

  const CallbackAction action =
      callback_ ? callback_(values, objective) : CallbackAction::kContinue;

  auto& pool = outcome_.pool;
  if (config_.pool_size > 0) {
    if (static_cast<int>(pool.size()) >= config_.pool_size) {
      auto worst = std::min_element(pool.begin(), pool.end(),
                                    [](const Incumbent& a, const Incumbent& b) {
                                      return a.objective < b.objective;
                                    });
      if (worst->objective < objective) pool.erase(worst);
    }
    if (static_cast<int>(pool.size()) < config_.pool_size) {
      pool.push_back({std::move(values), objective, node.id, now});
    }
  }
  return action == CallbackAction::kStop;
}

double Search::OpenBound() const {
  double bound = closed_bound_;
  if (!open_.empty()) bound = std::max(bound, open_.top().bound);
  if (next_) bound = std::max(bound, next_->bound);
  return bound;
}

SolveOutcome Search::Run() {
  start_ = Clock::now();
  Deadline deadline;
  if (std::isfinite(config_.time_limit_seconds)) {
    deadline = start_ + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(
                                std::max(0.0, config_.time_limit_seconds)));
  }
  if (config_.node_log != nullptr) *config_.node_log << "wall_time,objective,bound,nodes\n";

  std::vector<double> base_lo(model_.num_variables());
  std::vector<double> base_hi(model_.num_variables());
  for (int j = 0; j < model_.num_variables(); ++j) {
    base_lo[j] = model_.variables()[j].lower;
    base_hi[j] = model_.variables()[j].upper;
  }
  std::vector<double> lo = base_lo;
  std::vector<double> hi = base_hi;

  int64_t next_id = 1;
  next_ = Node{0, 0, kInfinity, std::vector<int8_t>(binaries_.size(), -1)};
  plunging_ = hybrid_;
  bool first_lp = true;
  bool stopped = false;
  bool timed_out = false;
  double stop_bound = -kInfinity;
  SolveStatistics& stats = outcome_.stats;

  while (true) {
    Node node;
    if (next_) {
      node = std::move(*next_);
      next_.reset();
    } else if (!open_.empty()) {
      node = open_.top();
      open_.pop();
    } else {
      break;
    }
    if (node.bound <= Threshold()) {
      closed_bound_ = std::max(closed_bound_, node.bound);
      continue;
    }
    if (deadline && Clock::now() >= *deadline) {
      open_.push(std::move(node));
      timed_out = true;
      break;
    }

    for (size_t k = 0; k < binaries_.size(); ++k) {
      const int var = binaries_[k];
      if (node.fix[k] < 0) {
        lo[var] = base_lo[var];
        hi[var] = base_hi[var];
      } else {
        lo[var] = hi[var] = node.fix[k];
      }
    }
    LpResult lp = config_.warm_start && !first_lp ? lp_.Resolve(lo, hi, deadline)
                                                  : lp_.Solve(lo, hi, deadline);
    first_lp = false;
    ++stats.lps_solved;
    stats.lp_iterations += lp.iterations;
    if (lp.status == LpStatus::kNumericFailure || lp.status == LpStatus::kIterationLimit) {
      lp = lp_.Solve(lo, hi, deadline);
      ++stats.lps_solved;
      stats.lp_iterations += lp.iterations;
    }
    if (lp.status == LpStatus::kTimeLimit) {
      open_.push(std::move(node));
      timed_out = true;
      break;
    }
    if (lp.status == LpStatus::kNumericFailure || lp.status == LpStatus::kIterationLimit ||
        lp.status == LpStatus::kUnbounded) {
      throw SolverError(fmt::format("LP relaxation {} at node {} (depth {})",
                                    ToString(lp.status), node.id, node.depth),
                        node.id, node.depth);
    }
    ++stats.nodes_explored;
    stats.max_depth = std::max(stats.max_depth, node.depth);
    if (lp.status == LpStatus::kInfeasible) {
      plunging_ = false;
      continue;
    }
    const double constant = model_.objective_constant();
    const double node_bound = std::min(node.bound, lp.bound + constant);

    int branch = -1;
    double closest = kInfinity;
    for (size_t k = 0; k < binaries_.size(); ++k) {
      const double v = lp.values[binaries_[k]];
      if (std::min(v, 1.0 - v) <= config_.integrality_tolerance) continue;
      const double distance = std::abs(v - 0.5);
      if (distance < closest) {
        closest = distance;
        branch = static_cast<int>(k);
      }
    }

    if (branch < 0) {
      closed_bound_ = std::max(closed_bound_, node_bound);
      plunging_ = false;
      if (auto point = RoundingHeuristic(model_, lp.values,
                                         config_.integrality_tolerance)) {
        if (Offer(std::move(*point), node, false)) {
          stop_bound = node_bound;
          stopped = true;
          break;
        }
      }
      continue;
    }

    const bool round = config_.rounding_heuristic &&
                       (config_.emphasis == Emphasis::kFeasibility || node.id == 0 ||
                        stats.nodes_explored % kBalancedHeuristicPeriod == 0);
    if (round) {
      if (auto point = RoundingHeuristic(model_, lp.values,
                                         config_.integrality_tolerance)) {
        if (Offer(std::move(*point), node, true)) {
          stop_bound = node_bound;
          stopped = true;
          break;
        }
      }
    }
    if (node_bound <= Threshold()) {
      closed_bound_ = std::max(closed_bound_, node_bound);
      plunging_ = false;
      continue;
    }

    Node down{next_id++, node.depth + 1, node_bound, node.fix};
    Node up{next_id++, node.depth + 1, node_bound, std::move(node.fix)};
    down.fix[branch] = 0;
    up.fix[branch] = 1;
    const bool up_first = config_.emphasis == Emphasis::kFeasibility;
    Node& first = up_first ? up : down;
    Node& second = up_first ? down : up;
    if (plunging_) {
      next_ = std::move(first);
      open_.push(std::move(second));
    } else {
      open_.push(std::move(first));
      open_.push(std::move(second));
    }
  }

  stats.wall_time = Elapsed();
  stats.cold_fallbacks = lp_.cold_fallbacks();
  stats.max_lp_iteration_seconds = lp_.max_check_interval_seconds();
  const bool has = outcome_.has_incumbent();
  if (stopped) {
    outcome_.status = SolveStatus::kStoppedByCallback;
    outcome_.best_bound =
        std::max({OpenBound(), stop_bound, outcome_.best_objective});
  } else if (timed_out) {
    outcome_.status = has ? SolveStatus::kFeasible : SolveStatus::kTimeoutNoIncumbent;
    outcome_.best_bound = std::max(OpenBound(), outcome_.best_objective);
  } else if (has) {
    outcome_.status = SolveStatus::kOptimal;
    outcome_.best_bound = std::max(closed_bound_, outcome_.best_objective);
  } else {
    outcome_.status = SolveStatus::kInfeasible;
    outcome_.best_bound = -kInfinity;
  }
  return std::move(outcome_);
}

}  // namespace

SolveOutcome BranchAndBound(const MilpModel& model, const SolverConfig& config,
                            const IncumbentCallback& callback) {
  model.Validate();
  Search search(model, config, callback);
  return search.Run();
}

}  // namespace nnsur
