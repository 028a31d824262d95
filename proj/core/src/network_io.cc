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

#include "nnsur/network_io.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace nnsur {
namespace {

using nlohmann::json;

const json& Field(const json& object, const char* name, const std::string& where) {
  if (!object.is_object() || !object.contains(name)) {
    throw ParseError(fmt::format("{}: missing field '{}'", where, name));
  }
  return object.at(name);
}

std::vector<double> RealList(const json& value, const std::string& where) {
  if (!value.is_array()) {
    throw ParseError(fmt::format("{}: expected a list of reals", where));
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      throw ParseError(fmt::format("{}[{}]: expected a real", where, i));
    }
    out.push_back(value[i].get<double>());
  }
  return out;
}

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

void ExpectSize(size_t got, size_t want, const std::string& where) {
  if (got != want) {
    throw ParseError(
        fmt::format("{}: expected {} values, got {}", where, want, got));
  }
}

}  // namespace

std::string NetworkToJson(const Network& net) {
  net.Validate();
  json doc;
  doc["dims"] = net.dims;
  doc["domain_lo"] = std::vector<double>(net.domain.lower.begin(),
                                         net.domain.lower.end());
  doc["domain_hi"] = std::vector<double>(net.domain.upper.begin(),
                                         net.domain.upper.end());
  json layers = json::array();
  for (int l = 0; l < net.layer_count(); ++l) {
    const Eigen::MatrixXd& w = net.weights[l];
    std::vector<double> flat;
    flat.reserve(w.size());
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) flat.push_back(w(i, j));
    }
    layers.push_back({{"weights", std::move(flat)},
                      {"biases", std::vector<double>(net.biases[l].begin(),
                                                     net.biases[l].end())}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

Network NetworkFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Map the byte offset back to a line number.
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ParseError(fmt::format("line {}: {}", line, e.what()));
  }

  Network net;
  const json& dims = Field(doc, "dims", "network");
  if (!dims.is_array() || dims.size() < 2) {
    throw ParseError("dims: expected at least two layer sizes");
  }
  for (size_t i = 0; i < dims.size(); ++i) {
    if (!dims[i].is_number_integer() || dims[i].get<int>() <= 0) {
      throw ParseError(fmt::format("dims[{}]: expected a positive integer", i));
    }
    net.dims.push_back(dims[i].get<int>());
  }
  const auto lo = RealList(Field(doc, "domain_lo", "network"), "domain_lo");
  const auto hi = RealList(Field(doc, "domain_hi", "network"), "domain_hi");
  ExpectSize(lo.size(), net.dims[0], "domain_lo");
  ExpectSize(hi.size(), net.dims[0], "domain_hi");
  net.domain = Box{ToVector(lo), ToVector(hi)};

  const json& layers = Field(doc, "layers", "network");
  if (!layers.is_array() || layers.size() + 1 != net.dims.size()) {
    throw ParseError(fmt::format("layers: expected {} layers",
                                 net.dims.size() - 1));
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string where = fmt::format("layers[{}]", l);
    const int rows = net.dims[l + 1];
    const int cols = net.dims[l];
    const auto flat = RealList(Field(layers[l], "weights", where),
                               where + ".weights");
    ExpectSize(flat.size(), static_cast<size_t>(rows) * cols, where + ".weights");
    Eigen::MatrixXd w(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) w(i, j) = flat[static_cast<size_t>(i) * cols + j];
    }
    const auto b = RealList(Field(layers[l], "biases", where), where + ".biases");
    ExpectSize(b.size(), rows, where + ".biases");
    net.weights.push_back(std::move(w));
    net.biases.push_back(ToVector(b));
  }
  try {
    net.Validate();
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
  return net;
}

void SaveNetwork(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path));
  out << NetworkToJson(net) << '\n';
}

Network LoadNetwork(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("{}: cannot open", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return NetworkFromJson(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace nnsur
