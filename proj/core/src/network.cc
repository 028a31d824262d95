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

#include "nnsur/network.h"

#include <cmath>
#include <random>

#include <fmt/format.h>

namespace nnsur {

Box Box::Uniform(int size, double lo, double hi) {
  return Box{Eigen::VectorXd::Constant(size, lo),
             Eigen::VectorXd::Constant(size, hi)};
}

bool Box::Contains(const Eigen::VectorXd& x, double tolerance) const {
  if (x.size() != lower.size()) return false;
  for (int k = 0; k < x.size(); ++k) {
    if (x[k] < lower[k] - tolerance || x[k] > upper[k] + tolerance) {
      return false;
    }
  }
  return true;
}

bool operator==(const Box& a, const Box& b) {
  return a.lower.size() == b.lower.size() && a.upper.size() == b.upper.size() &&
         a.lower == b.lower && a.upper == b.upper;
}

int64_t Network::weight_count() const {
  int64_t count = 0;
  for (const auto& w : weights) count += w.size();
  return count;
}

int64_t Network::nonzero_weight_count() const {
  int64_t count = 0;
  for (const auto& w : weights) count += (w.array() != 0.0).count();
  return count;
}

void Network::Validate() const {
  if (dims.size() < 2) {
    throw StructuralError("network needs at least an input and output size");
  }
  for (size_t l = 0; l < dims.size(); ++l) {
    if (dims[l] <= 0) {
      throw StructuralError(fmt::format("dims[{}] = {} is not positive", l,
                                        dims[l]));
    }
  }
  const size_t layers = dims.size() - 1;
  if (weights.size() != layers || biases.size() != layers) {
    throw StructuralError(fmt::format(
        "expected {} weight matrices and bias vectors, got {} and {}", layers,
        weights.size(), biases.size()));
  }
  for (size_t l = 0; l < layers; ++l) {
    if (weights[l].rows() != dims[l + 1] || weights[l].cols() != dims[l]) {
      throw StructuralError(fmt::format(
          "layer {} weights are {}x{}, expected {}x{}", l, weights[l].rows(),
          weights[l].cols(), dims[l + 1], dims[l]));
    }
    if (biases[l].size() != dims[l + 1]) {
      throw StructuralError(fmt::format("layer {} bias has {} entries, expected {}",
                                        l, biases[l].size(), dims[l + 1]));
    }
  }
  if (domain.lower.size() != dims[0] || domain.upper.size() != dims[0]) {
    throw StructuralError(fmt::format(
        "input domain has {} coordinates, expected {}", domain.lower.size(),
        dims[0]));
  }
  for (int k = 0; k < dims[0]; ++k) {
    if (!std::isfinite(domain.lower[k]) || !std::isfinite(domain.upper[k]) ||
        domain.lower[k] > domain.upper[k]) {
      throw StructuralError(fmt::format("input domain coordinate {} is [{}, {}]",
                                        k, domain.lower[k], domain.upper[k]));
    }
  }
}

bool operator==(const Network& a, const Network& b) {
  if (a.dims != b.dims || !(a.domain == b.domain)) return false;
  if (a.weights.size() != b.weights.size()) return false;
  for (size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

LayerActivations Forward(const Network& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_size()) {
    throw StructuralError(fmt::format("input has {} entries, network expects {}",
                                      x.size(), net.input_size()));
  }
  LayerActivations acts;
  acts.input = x;
  acts.pre.reserve(net.layer_count());
  acts.post.reserve(net.layer_count());
  const Eigen::VectorXd* prev = &acts.input;
  for (int l = 0; l < net.layer_count(); ++l) {
    Eigen::VectorXd g = net.weights[l] * *prev + net.biases[l];
    acts.pre.push_back(g);
    if (net.is_output_layer(l)) {
      acts.post.push_back(std::move(g));
    } else {
      acts.post.push_back(acts.pre.back().cwiseMax(0.0));
    }
    prev = &acts.post.back();
  }
  return acts;
}

Eigen::VectorXd Evaluate(const Network& net, const Eigen::VectorXd& x) {
  return Forward(net, x).output();
}

Network RandomInit(std::span<const int> dims, uint64_t seed, const Box& domain) {
  if (dims.size() < 2) {
    throw StructuralError("RandomInit needs at least two layer sizes");
  }
  Network net;
  net.dims.assign(dims.begin(), dims.end());
  net.domain = domain;
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] <= 0 || dims[l + 1] <= 0) {
      throw StructuralError("layer sizes must be positive");
    }
    const double limit = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  net.Validate();
  return net;
}

Network RandomInit(std::span<const int> dims, uint64_t seed) {
  if (dims.empty()) throw StructuralError("RandomInit needs layer sizes");
  return RandomInit(dims, seed, Box::Uniform(dims[0], -1.0, 1.0));
}

int ArgMax(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

int RunnerUp(const Eigen::VectorXd& v, int exclude) {
  int best = -1;
  for (int i = 0; i < v.size(); ++i) {
    if (i == exclude) continue;
    if (best < 0 || v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace nnsur
