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

#ifndef NNSUR_MILP_MODEL_H_
#define NNSUR_MILP_MODEL_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnsur {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { kContinuous, kBinary };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

// What a model variable stands for in network terms. Layers are 0-based
// weight-layer indices; `index` is the neuron or input coordinate.
enum class Role { kOther, kInput, kDelta, kPre, kPost, kIndicator, kOutput };

struct VarTag {
  Role role = Role::kOther;
  int layer = -1;
  int index = -1;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarType type = VarType::kContinuous;
  VarTag tag;
};

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// Recomputes a defined variable from already-known ones. Affine steps set
// target = sum(terms) + constant; ReLU steps set target = max(0, source) and,
// when indicator >= 0, indicator = (source > 0).
struct ForwardStep {
  enum class Kind { kAffine, kRelu };
  Kind kind = Kind::kAffine;
  int target = -1;
  std::vector<Term> terms;
  double constant = 0.0;
  int source = -1;
  int indicator = -1;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A maximisation MILP: bounded continuous and binary variables, linear rows
// and a linear objective.
class MilpModel {
 public:
  int AddVariable(std::string name, double lower, double upper,
                  VarType type = VarType::kContinuous, VarTag tag = {});
  int AddBinary(std::string name, VarTag tag = {});
  // Throws ModelError on undeclared variables.
  int AddConstraint(std::string name, std::vector<Term> terms, Relation relation,
                    double rhs);
  void SetObjective(std::vector<Term> terms, double constant = 0.0);
  void AddForwardStep(ForwardStep step);
  void SetVariableBounds(int var, double lower, double upper);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  const std::vector<ForwardStep>& forward_steps() const { return forward_steps_; }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;
  std::vector<int> binary_indices() const;
  // Nonzero constraint coefficients.
  int64_t nonzero_count() const;

  std::optional<int> FindVariable(const std::string& name) const;
  std::vector<int> VariablesWithRole(Role role) const;

  double ObjectiveValue(std::span<const double> values) const;
  double RowActivity(int row, std::span<const double> values) const;
  // Largest violation over rows, bounds and binary integrality.
  double MaxViolation(std::span<const double> values) const;
  bool IsFeasible(std::span<const double> values, double tolerance) const {
    return MaxViolation(values) <= tolerance;
  }

  // Evaluates forward_steps() in order, overwriting the defined variables.
  void RunForwardSteps(std::vector<double>& values) const;

  void Validate() const;

 private:
  void CheckVar(int var) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  double objective_constant_ = 0.0;
  std::vector<ForwardStep> forward_steps_;
};

}  // namespace nnsur

#endif  // NNSUR_MILP_MODEL_H_
