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

#include "nnsur/lp_format.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nnsur {
namespace {

// LP files wrap long rows; 255 characters is the common parser limit.
constexpr size_t kMaxLine = 200;

void AppendExpression(std::string& out, const std::vector<Term>& terms,
                      const std::vector<Variable>& vars, size_t prefix) {
  size_t line = prefix;
  bool first = true;
  for (const Term& t : terms) {
    std::string piece;
    if (first) {
      piece = t.coef < 0 ? fmt::format("- {} {}", -t.coef, vars[t.var].name)
                         : fmt::format("{} {}", t.coef, vars[t.var].name);
    } else {
      piece = fmt::format(" {} {} {}", t.coef < 0 ? '-' : '+', std::abs(t.coef),
                          vars[t.var].name);
    }
    if (line + piece.size() > kMaxLine) {
      out += "\n  ";
      line = 2;
    }
    out += piece;
    line += piece.size();
    first = false;
  }
  if (first) out += "0 " + (vars.empty() ? std::string("x") : vars.front().name);
}

std::string Bound(double v) {
  if (v == kInfinity) return "+inf";
  if (v == -kInfinity) return "-inf";
  return fmt::format("{}", v);
}

}  // namespace

std::string ToLpString(const MilpModel& model) {
  const auto& vars = model.variables();
  std::string out = "\\ nnsur model\nMaximize\n obj: ";
  AppendExpression(out, model.objective(), vars, 6);
  if (model.objective_constant() != 0.0) {
    out += fmt::format(" {} {}", model.objective_constant() < 0 ? '-' : '+',
                       std::abs(model.objective_constant()));
  }
  out += "\nSubject To\n";
  for (const Constraint& c : model.constraints()) {
    out += fmt::format(" {}: ", c.name);
    AppendExpression(out, c.terms, vars, c.name.size() + 3);
    const char* rel = c.relation == Relation::kLessEqual    ? "<="
                      : c.relation == Relation::kEqual ? "="
                                                       : ">=";
    out += fmt::format(" {} {}\n", rel, c.rhs);
  }
  out += "Bounds\n";
  for (const Variable& v : vars) {
    if (v.type == VarType::kBinary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == v.upper) {
      out += fmt::format(" {} = {}\n", v.name, Bound(v.lower));
    } else if (v.lower == -kInfinity && v.upper == kInfinity) {
      out += fmt::format(" {} free\n", v.name);
    } else {
      out += fmt::format(" {} <= {} <= {}\n", Bound(v.lower), v.name, Bound(v.upper));
    }
  }
  bool any_binary = false;
  for (const Variable& v : vars) {
    if (v.type != VarType::kBinary) continue;
    if (!any_binary) out += "Binaries\n";
    any_binary = true;
    out += fmt::format(" {}\n", v.name);
  }
  out += "End\n";
  return out;
}

void WriteLpFile(const MilpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path));
  out << ToLpString(model);
}

}  // namespace nnsur
