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

#include "oracles.h"

#include <cmath>
#include <cstdio>
#include <functional>

#include "nnsur/bounds.h"
#include "nnsur/milp_model.h"
#include "nnsur/simplex.h"

namespace nnsur::testing {

PatternOracleResult PatternEnumerationMax(const Network& net, const Box& box, int out,
                                          int minus) {
  const ActivationBounds bounds = IntervalPropagate(net, box);
  std::vector<std::pair<int, int>> unstable;
  for (int l = 0; l + 1 < net.layer_count(); ++l) {
    for (int i = 0; i < net.dims[l + 1]; ++i) {
      if (bounds.stability(l, i) == Stability::kUnstable) unstable.push_back({l, i});
    }
  }
  const int n0 = net.input_size();
  PatternOracleResult result;
  const uint64_t patterns = uint64_t{1} << unstable.size();
  for (uint64_t pattern = 0; pattern < patterns; ++pattern) {
    ++result.patterns;
    MilpModel lp;
    for (int k = 0; k < n0; ++k) {
      lp.AddVariable("x" + std::to_string(k), box.lower[k], box.upper[k]);
    }
    // Current layer output as an affine map of x: post = m x + v.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n0, n0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n0);
    double constant = 0.0;
    int bit = 0;
    for (int l = 0; l < net.layer_count(); ++l) {
      const Eigen::MatrixXd p = net.weights[l] * m;
      const Eigen::VectorXd q = net.weights[l] * v + net.biases[l];
      if (net.is_output_layer(l)) {
        Eigen::VectorXd obj = p.row(out).transpose();
        constant = q[out];
        if (minus >= 0) {
          obj -= p.row(minus).transpose();
          constant -= q[minus];
        }
        std::vector<Term> terms;
        for (int k = 0; k < n0; ++k) terms.push_back({k, obj[k]});
        lp.SetObjective(terms);
        break;
      }
      Eigen::MatrixXd next_m = p;
      Eigen::VectorXd next_v = q;
      for (int i = 0; i < net.dims[l + 1]; ++i) {
        bool active;
        const Stability s = bounds.stability(l, i);
        if (s == Stability::kUnstable) {
          active = (pattern >> bit) & 1;
          ++bit;
          std::vector<Term> terms;
          for (int k = 0; k < n0; ++k) terms.push_back({k, p(i, k)});
          lp.AddConstraint("s", terms, active ? Relation::kGreaterEqual : Relation::kLessEqual,
                           -q[i]);
        } else {
          active = s == Stability::kStablyActive;
        }
        if (!active) {
          next_m.row(i).setZero();
          next_v[i] = 0.0;
        }
      }
      m = next_m;
      v = next_v;
    }
    const LpResult r = SolveLp(lp);
    if (r.status != LpStatus::kOptimal) continue;
    ++result.feasible_patterns;
    const double value = r.objective + constant;
    if (value > result.optimum) {
      result.optimum = value;
      result.argmax = Eigen::Map<const Eigen::VectorXd>(r.values.data(), n0);
    }
  }
  return result;
}

std::optional<double> VertexEnumerationMax(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& c, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(a.rows());
  // All constraints as g x <= h.
  Eigen::MatrixXd g(m + 2 * n, n);
  Eigen::VectorXd h(m + 2 * n);
  g.topRows(m) = a;
  h.head(m) = b;
  for (int k = 0; k < n; ++k) {
    g.row(m + 2 * k).setZero();
    g(m + 2 * k, k) = 1.0;
    h[m + 2 * k] = hi[k];
    g.row(m + 2 * k + 1).setZero();
    g(m + 2 * k + 1, k) = -1.0;
    h[m + 2 * k + 1] = -lo[k];
  }
  const int total = m + 2 * n;
  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd sys(n, n);
      Eigen::VectorXd rhs(n);
      for (int k = 0; k < n; ++k) {
        sys.row(k) = g.row(pick[k]);
        rhs[k] = h[pick[k]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(rhs);
      const Eigen::VectorXd slack = h - g * x;
      for (int r = 0; r < total; ++r) {
        if (slack[r] < -1e-9 * (1.0 + std::abs(h[r]))) return;
      }
      const double value = c.dot(x);
      if (!best || value > *best) best = value;
      return;
    }
    for (int r = start; r < total; ++r) {
      pick[depth] = r;
      choose(r + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

namespace {

std::string Number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename Range>
std::string List(const Range& values) {
  std::string out = "[";
  bool first = true;
  for (double v : values) {
    if (!first) out += ", ";
    out += Number(v);
    first = false;
  }
  return out + "]";
}

}  // namespace

std::string HandWrittenNetworkJson(const Network& net) {
  std::string out = "{\n  \"dims\": [";
  for (size_t i = 0; i < net.dims.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(net.dims[i]);
  }
  out += "],\n  \"domain_lo\": " + List(net.domain.lower) + ",\n";
  out += "  \"domain_hi\": " + List(net.domain.upper) + ",\n  \"layers\": [\n";
  for (int l = 0; l < net.layer_count(); ++l) {
    std::vector<double> flat;
    for (int r = 0; r < net.weights[l].rows(); ++r) {
      for (int c = 0; c < net.weights[l].cols(); ++c) flat.push_back(net.weights[l](r, c));
    }
    out += "    {\"weights\": " + List(flat) + ", \"biases\": " + List(net.biases[l]) + "}";
    out += l + 1 < net.layer_count() ? ",\n" : "\n";
  }
  return out + "  ]\n}\n";
}

}  // namespace nnsur::testing
