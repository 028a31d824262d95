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

#include "nnsur/milp_model.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace nnsur {

int MilpModel::AddVariable(std::string name, double lower, double upper,
                           VarType type, VarTag tag) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw ModelError(fmt::format("variable {} has bounds [{}, {}]", name, lower,
                                 upper));
  }
  variables_.push_back(Variable{std::move(name), lower, upper, type, tag});
  return static_cast<int>(variables_.size()) - 1;
}

int MilpModel::AddBinary(std::string name, VarTag tag) {
  return AddVariable(std::move(name), 0.0, 1.0, VarType::kBinary, tag);
}

void MilpModel::CheckVar(int var) const {
  if (var < 0 || var >= num_variables()) {
    throw ModelError(fmt::format("reference to undeclared variable {}", var));
  }
}

int MilpModel::AddConstraint(std::string name, std::vector<Term> terms,
                             Relation relation, double rhs) {
  for (const Term& t : terms) CheckVar(t.var);
  if (!std::isfinite(rhs)) {
    throw ModelError(fmt::format("constraint {} has non-finite rhs", name));
  }
  constraints_.push_back(Constraint{std::move(name), std::move(terms), relation, rhs});
  return static_cast<int>(constraints_.size()) - 1;
}

void MilpModel::SetObjective(std::vector<Term> terms, double constant) {
  for (const Term& t : terms) CheckVar(t.var);
  objective_ = std::move(terms);
  objective_constant_ = constant;
}

void MilpModel::AddForwardStep(ForwardStep step) {
  CheckVar(step.target);
  for (const Term& t : step.terms) CheckVar(t.var);
  if (step.kind == ForwardStep::Kind::kRelu) CheckVar(step.source);
  if (step.indicator >= 0) CheckVar(step.indicator);
  forward_steps_.push_back(std::move(step));
}

void MilpModel::SetVariableBounds(int var, double lower, double upper) {
  CheckVar(var);
  if (lower > upper) throw ModelError("SetVariableBounds: lower > upper");
  variables_[var].lower = lower;
  variables_[var].upper = upper;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count_if(
      variables_.begin(), variables_.end(),
      [](const Variable& v) { return v.type == VarType::kBinary; }));
}

std::vector<int> MilpModel::binary_indices() const {
  std::vector<int> out;
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].type == VarType::kBinary) out.push_back(j);
  }
  return out;
}

int64_t MilpModel::nonzero_count() const {
  int64_t count = 0;
  for (const Constraint& c : constraints_) {
    for (const Term& t : c.terms) count += t.coef != 0.0;
  }
  return count;
}

std::optional<int> MilpModel::FindVariable(const std::string& name) const {
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<int> MilpModel::VariablesWithRole(Role role) const {
  std::vector<int> out;
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[j].tag.role == role) out.push_back(j);
  }
  return out;
}

double MilpModel::ObjectiveValue(std::span<const double> values) const {
  double total = objective_constant_;
  for (const Term& t : objective_) total += t.coef * values[t.var];
  return total;
}

double MilpModel::RowActivity(int row, std::span<const double> values) const {
  double total = 0.0;
  for (const Term& t : constraints_[row].terms) total += t.coef * values[t.var];
  return total;
}

double MilpModel::MaxViolation(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != num_variables()) return kInfinity;
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    const double x = values[j];
    if (!std::isfinite(x)) return kInfinity;
    worst = std::max({worst, v.lower - x, x - v.upper});
    if (v.type == VarType::kBinary) worst = std::max(worst, std::abs(x - std::round(x)));
  }
  for (int r = 0; r < num_constraints(); ++r) {
    const double activity = RowActivity(r, values);
    const double rhs = constraints_[r].rhs;
    switch (constraints_[r].relation) {
      case Relation::kLessEqual: worst = std::max(worst, activity - rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, rhs - activity); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(activity - rhs)); break;
    }
  }
  return worst;
}

void MilpModel::RunForwardSteps(std::vector<double>& values) const {
  for (const ForwardStep& step : forward_steps_) {
    if (step.kind == ForwardStep::Kind::kAffine) {
      double total = step.constant;
      for (const Term& t : step.terms) total += t.coef * values[t.var];
      values[step.target] = total;
    } else {
      const double g = values[step.source];
      values[step.target] = std::max(0.0, g);
      if (step.indicator >= 0) values[step.indicator] = g > 0.0 ? 1.0 : 0.0;
    }
  }
}

void MilpModel::Validate() const {
  for (const Constraint& c : constraints_) {
    for (const Term& t : c.terms) CheckVar(t.var);
  }
  for (const Variable& v : variables_) {
    if (v.type == VarType::kBinary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw ModelError(fmt::format("binary {} has bounds outside [0, 1]", v.name));
    }
  }
}

}  // namespace nnsur
