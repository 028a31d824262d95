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

#include "nnsur/encoder.h"

#include <cmath>

#include <fmt/format.h>

namespace nnsur {
namespace {

void CheckBounds(const Network& net, const ActivationBounds& bounds) {
  if (bounds.layer_count() != net.layer_count()) {
    throw EncodingError("activation bounds do not match the network depth");
  }
  for (int l = 0; l < net.layer_count(); ++l) {
    if (bounds.pre_lo[l].size() != net.dims[l + 1]) {
      throw EncodingError(fmt::format("bounds for layer {} have the wrong width", l));
    }
    for (int i = 0; i < net.dims[l + 1]; ++i) {
      if (!std::isfinite(bounds.pre_lo[l][i]) || !std::isfinite(bounds.pre_hi[l][i])) {
        throw EncodingError(fmt::format(
            "neuron ({}, {}) has an unbounded pre-activation interval", l, i));
      }
    }
  }
}

}  // namespace

NetworkEncoding EncodeNetwork(const Network& net, const ActivationBounds& bounds,
                              std::span<const int> input_vars, MilpModel& model,
                              const EncodeOptions& options) {
  if (static_cast<int>(input_vars.size()) != net.input_size()) {
    throw EncodingError("input variable count does not match the network");
  }
  CheckBounds(net, bounds);
  const double slack = options.big_m_slack;

  NetworkEncoding enc;
  enc.inputs.assign(input_vars.begin(), input_vars.end());
  // Previous layer's variables; -1 marks a neuron fixed at zero.
  std::vector<int> prev(enc.inputs);
  for (int l = 0; l < net.layer_count(); ++l) {
    const int width = net.dims[l + 1];
    const Eigen::MatrixXd& w = net.weights[l];
    enc.pre.emplace_back(width, -1);
    enc.post.emplace_back(width, -1);
    enc.indicator.emplace_back(width, -1);
    std::vector<int> current(width, -1);
    const bool output = net.is_output_layer(l);
    const int layer_no = l + 1;

    for (int i = 0; i < width; ++i) {
      std::vector<Term> affine;
      for (int k = 0; k < w.cols(); ++k) {
        if (w(i, k) != 0.0 && prev[k] >= 0) affine.push_back({prev[k], w(i, k)});
      }
      const double b = net.biases[l][i];
      const double lo = bounds.pre_lo[l][i] - slack;
      const double hi = bounds.pre_hi[l][i] + slack;

      // Row: var - sum(affine) = b.
      const auto define = [&](int var, const std::string& row) {
        std::vector<Term> terms{{var, 1.0}};
        for (const Term& t : affine) terms.push_back({t.var, -t.coef});
        model.AddConstraint(row, std::move(terms), Relation::kEqual, b);
        model.AddForwardStep({ForwardStep::Kind::kAffine, var, affine, b, -1, -1});
      };

      if (output) {
        const int y = model.AddVariable(fmt::format("y_{}", i), lo, hi,
                                        VarType::kContinuous,
                                        {Role::kOutput, l, i});
        define(y, fmt::format("out_{}", i));
        enc.pre[l][i] = enc.post[l][i] = y;
        enc.outputs.push_back(y);
        current[i] = y;
        continue;
      }

      switch (bounds.stability(l, i)) {
        case Stability::kStablyInactive: {
          const int h = model.AddVariable(fmt::format("h_{}_{}", layer_no, i), 0.0,
                                          0.0, VarType::kContinuous,
                                          {Role::kPost, l, i});
          model.AddForwardStep({ForwardStep::Kind::kAffine, h, {}, 0.0, -1, -1});
          enc.post[l][i] = h;
          break;
        }
        case Stability::kStablyActive: {
          const int h = model.AddVariable(fmt::format("h_{}_{}", layer_no, i), lo,
                                          hi, VarType::kContinuous,
                                          {Role::kPost, l, i});
          define(h, fmt::format("def_{}_{}", layer_no, i));
          enc.pre[l][i] = enc.post[l][i] = h;
          current[i] = h;
          break;
        }
        case Stability::kUnstable: {
          const int g = model.AddVariable(fmt::format("g_{}_{}", layer_no, i), lo,
                                          hi, VarType::kContinuous,
                                          {Role::kPre, l, i});
          const int h = model.AddVariable(fmt::format("h_{}_{}", layer_no, i), 0.0,
                                          hi, VarType::kContinuous,
                                          {Role::kPost, l, i});
          const int z = model.AddBinary(fmt::format("z_{}_{}", layer_no, i),
                                        {Role::kIndicator, l, i});
          define(g, fmt::format("def_{}_{}", layer_no, i));
          // h >= g
          model.AddConstraint(fmt::format("relu_ge_{}_{}", layer_no, i),
                              {{h, 1.0}, {g, -1.0}}, Relation::kGreaterEqual, 0.0);
          // h <= g - lo (1 - z)
          model.AddConstraint(fmt::format("relu_act_{}_{}", layer_no, i),
                              {{h, 1.0}, {g, -1.0}, {z, -lo}}, Relation::kLessEqual,
                              -lo);
          // h <= hi z
          model.AddConstraint(fmt::format("relu_off_{}_{}", layer_no, i),
                              {{h, 1.0}, {z, -hi}}, Relation::kLessEqual, 0.0);
          model.AddForwardStep({ForwardStep::Kind::kRelu, h, {}, 0.0, g, z});
          enc.pre[l][i] = g;
          enc.post[l][i] = h;
          enc.indicator[l][i] = z;
          ++enc.binary_count;
          current[i] = h;
          break;
        }
      }
    }
    prev = std::move(current);
  }
  return enc;
}

EncodedProblem EncodeVnn(const Network& net, const ActivationBounds& bounds,
                         const Eigen::VectorXd& x0, double eps, int j,
                         int j_prime, const EncodeOptions& options) {
  if (x0.size() != net.input_size()) {
    throw StructuralError("x0 does not match the network input size");
  }
  if (j < 0 || j >= net.output_size() || j_prime < 0 ||
      j_prime >= net.output_size() || j == j_prime) {
    throw EncodingError(fmt::format("bad class pair ({}, {})", j, j_prime));
  }
  if (!net.domain.Contains(x0)) {
    throw EncodingError("x0 lies outside the network's input domain");
  }
  const Box box = TightenToBall(bounds.input, x0, eps);

  EncodedProblem problem;
  MilpModel& model = problem.model;
  std::vector<int> inputs;
  for (int k = 0; k < net.input_size(); ++k) {
    inputs.push_back(model.AddVariable(fmt::format("x_{}", k), box.lower[k],
                                       box.upper[k], VarType::kContinuous,
                                       {Role::kInput, -1, k}));
  }
  for (int k = 0; k < net.input_size(); ++k) {
    problem.deltas.push_back(model.AddVariable(fmt::format("d_{}", k), 0.0, eps,
                                               VarType::kContinuous,
                                               {Role::kDelta, -1, k}));
  }
  for (int k = 0; k < net.input_size(); ++k) {
    const int d = problem.deltas[k];
    // d >= x - x0  and  d >= x0 - x
    model.AddConstraint(fmt::format("abs_up_{}", k), {{d, 1.0}, {inputs[k], -1.0}},
                        Relation::kGreaterEqual, -x0[k]);
    model.AddConstraint(fmt::format("abs_dn_{}", k), {{d, 1.0}, {inputs[k], 1.0}},
                        Relation::kGreaterEqual, x0[k]);
  }
  std::vector<Term> ball;
  for (int d : problem.deltas) ball.push_back({d, 1.0});
  model.AddConstraint("l1_ball", std::move(ball), Relation::kLessEqual, eps);

  problem.encoding = EncodeNetwork(net, bounds, inputs, model, options);
  const auto& y = problem.encoding.outputs;
  model.SetObjective({{y[j_prime], 1.0}, {y[j], -1.0}});
  return problem;
}

EncodedProblem EncodeVnn(const Network& net, const Eigen::VectorXd& x0,
                         double eps, int j, int j_prime,
                         const EncodeOptions& options) {
  const ActivationBounds bounds =
      IntervalPropagate(net, TightenToBall(net.domain, x0, eps));
  return EncodeVnn(net, bounds, x0, eps, j, j_prime, options);
}

EncodedProblem EncodeFm(const Network& net, const ActivationBounds& bounds,
                        const EncodeOptions& options) {
  if (net.output_size() != 1) {
    throw EncodingError("function maximisation needs a single-output network");
  }
  EncodedProblem problem;
  std::vector<int> inputs;
  for (int k = 0; k < net.input_size(); ++k) {
    inputs.push_back(problem.model.AddVariable(
        fmt::format("x_{}", k), bounds.input.lower[k], bounds.input.upper[k],
        VarType::kContinuous, {Role::kInput, -1, k}));
  }
  problem.encoding = EncodeNetwork(net, bounds, inputs, problem.model, options);
  problem.model.SetObjective({{problem.encoding.outputs[0], 1.0}});
  return problem;
}

EncodedProblem EncodeFm(const Network& net, const EncodeOptions& options) {
  return EncodeFm(net, IntervalPropagate(net), options);
}

std::vector<double> AssignmentFromInput(const EncodedProblem& problem,
                                        const Network& net,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd* x0) {
  const LayerActivations acts = Forward(net, x);
  const NetworkEncoding& enc = problem.encoding;
  std::vector<double> values(problem.model.num_variables(), 0.0);
  for (int k = 0; k < x.size(); ++k) values[enc.inputs[k]] = x[k];
  if (x0 != nullptr) {
    for (size_t k = 0; k < problem.deltas.size(); ++k) {
      values[problem.deltas[k]] = std::abs(x[k] - (*x0)[k]);
    }
  }
  for (int l = 0; l < net.layer_count(); ++l) {
    for (int i = 0; i < net.dims[l + 1]; ++i) {
      if (enc.pre[l][i] >= 0) values[enc.pre[l][i]] = acts.pre[l][i];
      if (enc.post[l][i] >= 0) values[enc.post[l][i]] = acts.post[l][i];
      if (enc.indicator[l][i] >= 0) {
        values[enc.indicator[l][i]] = acts.pre[l][i] > 0.0 ? 1.0 : 0.0;
      }
    }
  }
  return values;
}

Eigen::VectorXd ExtractInput(const EncodedProblem& problem,
                             std::span<const double> values) {
  Eigen::VectorXd x(problem.encoding.inputs.size());
  for (int k = 0; k < x.size(); ++k) x[k] = values[problem.encoding.inputs[k]];
  return x;
}

}  // namespace nnsur
