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

#include "nnsur/bounds.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace nnsur {

Stability ActivationBounds::stability(int layer, int neuron) const {
  if (pre_hi[layer][neuron] <= 0.0) return Stability::kStablyInactive;
  if (pre_lo[layer][neuron] >= 0.0) return Stability::kStablyActive;
  return Stability::kUnstable;
}

ActivationBounds IntervalPropagate(const Network& net, const Box& input) {
  if (input.size() != net.input_size()) {
    throw StructuralError(fmt::format("input box has {} coordinates, expected {}",
                                      input.size(), net.input_size()));
  }
  for (int k = 0; k < input.size(); ++k) {
    if (!std::isfinite(input.lower[k]) || !std::isfinite(input.upper[k])) {
      throw StructuralError("interval propagation needs a finite input box");
    }
    if (input.lower[k] > input.upper[k]) {
      throw InfeasibleDomainError(fmt::format("input coordinate {} is empty", k));
    }
  }
  ActivationBounds bounds;
  bounds.input = input;
  Eigen::VectorXd lo = input.lower;
  Eigen::VectorXd hi = input.upper;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Eigen::MatrixXd& w = net.weights[l];
    const Eigen::MatrixXd pos = w.cwiseMax(0.0);
    const Eigen::MatrixXd neg = w.cwiseMin(0.0);
    Eigen::VectorXd g_lo = pos * lo + neg * hi + net.biases[l];
    Eigen::VectorXd g_hi = pos * hi + neg * lo + net.biases[l];
    bounds.pre_lo.push_back(g_lo);
    bounds.pre_hi.push_back(g_hi);
    if (net.is_output_layer(l)) {
      lo = std::move(g_lo);
      hi = std::move(g_hi);
    } else {
      lo = g_lo.cwiseMax(0.0);
      hi = g_hi.cwiseMax(0.0);
    }
    bounds.post_lo.push_back(lo);
    bounds.post_hi.push_back(hi);
  }
  return bounds;
}

ActivationBounds IntervalPropagate(const Network& net) {
  return IntervalPropagate(net, net.domain);
}

Box TightenToBall(const Box& domain, const Eigen::VectorXd& center, double eps) {
  if (center.size() != domain.size()) {
    throw StructuralError("ball centre does not match the domain");
  }
  if (!(eps >= 0.0)) {
    throw InfeasibleDomainError(fmt::format("negative radius {}", eps));
  }
  Box out{domain.lower.cwiseMax((center.array() - eps).matrix()),
          domain.upper.cwiseMin((center.array() + eps).matrix())};
  for (int k = 0; k < out.size(); ++k) {
    if (out.lower[k] > out.upper[k]) {
      throw InfeasibleDomainError(fmt::format(
          "coordinate {} is empty after intersecting with the ball", k));
    }
  }
  return out;
}

std::vector<LayerStability> StabilitySummary(const ActivationBounds& bounds) {
  std::vector<LayerStability> out;
  for (int l = 0; l + 1 < bounds.layer_count(); ++l) {
    LayerStability s;
    for (int i = 0; i < bounds.pre_lo[l].size(); ++i) {
      switch (bounds.stability(l, i)) {
        case Stability::kStablyActive: ++s.active; break;
        case Stability::kStablyInactive: ++s.inactive; break;
        case Stability::kUnstable: ++s.unstable; break;
      }
    }
    out.push_back(s);
  }
  return out;
}

std::string BoundsToCsv(const ActivationBounds& bounds) {
  std::string out = "layer,neuron,pre_lo,pre_hi,stability\n";
  for (int l = 0; l < bounds.layer_count(); ++l) {
    const bool hidden = l + 1 < bounds.layer_count();
    for (int i = 0; i < bounds.pre_lo[l].size(); ++i) {
      std::string state = "output";
      if (hidden) {
        switch (bounds.stability(l, i)) {
          case Stability::kStablyActive: state = "active"; break;
          case Stability::kStablyInactive: state = "inactive"; break;
          case Stability::kUnstable: state = "unstable"; break;
        }
      }
      out += fmt::format("{},{},{},{},{}\n", l, i, bounds.pre_lo[l][i],
                         bounds.pre_hi[l][i], state);
    }
  }
  return out;
}

}  // namespace nnsur
