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

#include "nnsur/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace nnsur {
namespace {

void CheckTask(const Network& net, const Dataset& data) {
  if (data.input_size() != net.input_size()) {
    throw StructuralError(fmt::format("dataset has {} inputs, network expects {}",
                                      data.input_size(), net.input_size()));
  }
  if (data.kind == TaskKind::kClassification &&
      net.output_size() != data.num_classes) {
    throw StructuralError(fmt::format("network has {} outputs for {} classes",
                                      net.output_size(), data.num_classes));
  }
  if (data.kind == TaskKind::kRegression && net.output_size() != 1) {
    throw StructuralError("regression needs a single-output network");
  }
}

// Forward pass on a batch (columns are samples). Keeps the pre-activations
// and the inputs to every layer.
struct BatchPass {
  std::vector<Eigen::MatrixXd> layer_inputs;  // h^{l-1}
  std::vector<Eigen::MatrixXd> pre;           // g^l
};

BatchPass ForwardBatch(const Network& net, const Eigen::MatrixXd& x) {
  BatchPass pass;
  Eigen::MatrixXd h = x;
  for (int l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd g = net.weights[l] * h;
    g.colwise() += net.biases[l];
    pass.layer_inputs.push_back(std::move(h));
    if (net.is_output_layer(l)) {
      h = g;
    } else {
      h = g.cwiseMax(0.0);
    }
    pass.pre.push_back(std::move(g));
  }
  return pass;
}

// Returns the summed loss over the batch and writes d(sum loss)/d(output).
double OutputLoss(const Dataset& data, const std::vector<int>& index,
                  const Eigen::MatrixXd& out, Eigen::MatrixXd* grad) {
  double total = 0.0;
  if (grad) grad->resize(out.rows(), out.cols());
  for (int s = 0; s < out.cols(); ++s) {
    if (data.kind == TaskKind::kClassification) {
      const Eigen::VectorXd z = out.col(s);
      const double peak = z.maxCoeff();
      const Eigen::VectorXd e = (z.array() - peak).exp();
      const double norm = e.sum();
      const int label = data.labels[index[s]];
      total += std::log(norm) - (z[label] - peak);
      if (grad) {
        grad->col(s) = e / norm;
        (*grad)(label, s) -= 1.0;
      }
    } else {
      const double diff = out(0, s) - data.targets[index[s]];
      total += diff * diff;
      if (grad) (*grad)(0, s) = 2.0 * diff;
    }
  }
  return total;
}

Gradient Backward(const Network& net, const BatchPass& pass,
                  Eigen::MatrixXd d_out) {
  Gradient grad;
  grad.weights.resize(net.layer_count());
  grad.biases.resize(net.layer_count());
  Eigen::MatrixXd d_pre = std::move(d_out);
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    grad.weights[l] = d_pre * pass.layer_inputs[l].transpose();
    grad.biases[l] = d_pre.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd d_h = net.weights[l].transpose() * d_pre;
    d_pre = (pass.pre[l - 1].array() > 0.0).select(d_h, 0.0);
  }
  return grad;
}

Eigen::MatrixXd Gather(const Dataset& data, const std::vector<int>& index) {
  Eigen::MatrixXd x(data.input_size(), static_cast<int>(index.size()));
  for (size_t s = 0; s < index.size(); ++s) x.col(s) = data.inputs.col(index[s]);
  return x;
}

std::vector<int> AllIndices(const Dataset& data) {
  std::vector<int> index(data.size());
  std::iota(index.begin(), index.end(), 0);
  return index;
}

bool AllFinite(const Network& net) {
  for (int l = 0; l < net.layer_count(); ++l) {
    if (!net.weights[l].allFinite() || !net.biases[l].allFinite()) return false;
  }
  return true;
}

}  // namespace

double Loss(const Network& net, const Dataset& data) {
  CheckTask(net, data);
  if (data.size() == 0) return 0.0;
  const std::vector<int> index = AllIndices(data);
  const BatchPass pass = ForwardBatch(net, data.inputs);
  Eigen::MatrixXd out = pass.pre.back();
  return OutputLoss(data, index, out, nullptr) / data.size();
}

Gradient LossGradient(const Network& net, const Dataset& data) {
  CheckTask(net, data);
  const std::vector<int> index = AllIndices(data);
  const BatchPass pass = ForwardBatch(net, data.inputs);
  Eigen::MatrixXd d_out;
  OutputLoss(data, index, pass.pre.back(), &d_out);
  d_out /= std::max(1, data.size());
  return Backward(net, pass, std::move(d_out));
}

double Accuracy(const Network& net, const Dataset& data) {
  if (data.kind != TaskKind::kClassification || data.size() == 0) return 0.0;
  int correct = 0;
  for (int s = 0; s < data.size(); ++s) {
    if (ArgMax(Evaluate(net, data.inputs.col(s))) == data.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

Network Train(const Network& net, const Dataset& data,
              const TrainOptions& options, const ParameterMask* frozen) {
  CheckTask(net, data);
  if (options.epochs < 0 || options.batch_size <= 0 ||
      !(options.learning_rate > 0.0)) {
    throw StructuralError("training options out of range");
  }
  Network out = net;
  if (options.epochs == 0 || data.size() == 0) return out;

  std::mt19937_64 rng(options.seed);
  std::vector<int> order = AllIndices(data);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (int start = 0; start < data.size(); start += options.batch_size) {
      const int end = std::min(data.size(), start + options.batch_size);
      const std::vector<int> batch(order.begin() + start, order.begin() + end);
      const BatchPass pass = ForwardBatch(out, Gather(data, batch));
      Eigen::MatrixXd d_out;
      epoch_loss += OutputLoss(data, batch, pass.pre.back(), &d_out);
      d_out /= static_cast<double>(batch.size());
      Gradient grad = Backward(out, pass, std::move(d_out));
      for (int l = 0; l < out.layer_count(); ++l) {
        if (frozen) {
          grad.weights[l].array() *= frozen->weights[l].array();
          grad.biases[l].array() *= frozen->biases[l].array();
        }
        out.weights[l] -= options.learning_rate * grad.weights[l];
        out.biases[l] -= options.learning_rate * grad.biases[l];
        if (frozen) {
          // Frozen entries stay exactly +0.0.
          out.weights[l] = (frozen->weights[l].array() != 0.0)
                               .select(out.weights[l], 0.0);
          out.biases[l] =
              (frozen->biases[l].array() != 0.0).select(out.biases[l], 0.0);
        }
      }
    }
    if (!std::isfinite(epoch_loss) || !AllFinite(out)) {
      throw TrainingError(
          fmt::format("training diverged in epoch {}", epoch + 1), epoch + 1);
    }
  }
  return out;
}

}  // namespace nnsur
