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

#include "nnsur/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

namespace nnsur {

std::string ToString(StudyKind kind) {
  return kind == StudyKind::kVerification ? "verification" : "maximization";
}

StudyKind ParseStudyKind(const std::string& text) {
  if (text == "verification" || text == "verify") return StudyKind::kVerification;
  if (text == "maximization" || text == "maximize") return StudyKind::kMaximization;
  throw ConfigError(fmt::format("unknown study '{}'", text));
}

namespace {

void CheckKeys(const toml::table& table, const std::set<std::string>& allowed,
               const std::string& context) {
  for (const auto& [key, node] : table) {
    if (!allowed.count(std::string(key.str()))) {
      throw ConfigError(fmt::format("{}: unknown key '{}' (line {})", context, key.str(),
                                    node.source().begin.line));
    }
  }
}

std::string Where(const std::string& context, const std::string& key) {
  return context.empty() ? key : context + "." + key;
}

template <typename T>
T Get(const toml::table& table, const std::string& key, T fallback,
      const std::string& context) {
  const toml::node* node = table.get(key);
  if (node == nullptr) return fallback;
  std::optional<T> v;
  if constexpr (std::is_same_v<T, double>) {
    v = node->value<double>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (node->is_boolean()) v = node->value<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (node->is_integer()) v = node->value<T>();
  } else {
    if (node->is_string()) v = node->value<std::string>();
  }
  if (!v) {
    throw ConfigError(fmt::format("{} has the wrong type (line {})", Where(context, key),
                                  node->source().begin.line));
  }
  return *v;
}

template <typename T>
std::vector<T> GetList(const toml::table& table, const std::string& key,
                       std::vector<T> fallback, const std::string& context) {
  const toml::node* node = table.get(key);
  if (node == nullptr) return fallback;
  const toml::array* array = node->as_array();
  if (array == nullptr) {
    throw ConfigError(fmt::format("{} must be a list (line {})", Where(context, key),
                                  node->source().begin.line));
  }
  std::vector<T> out;
  for (const toml::node& item : *array) {
    std::optional<T> v;
    if constexpr (std::is_same_v<T, double>) {
      v = item.value<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (item.is_boolean()) v = item.value<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (item.is_integer()) v = item.value<T>();
    } else {
      if (item.is_string()) v = item.value<std::string>();
    }
    if (!v) {
      throw ConfigError(fmt::format("{} holds an entry of the wrong type (line {})",
                                    Where(context, key), item.source().begin.line));
    }
    out.push_back(*v);
  }
  return out;
}

const toml::table* Section(const toml::table& root, const std::string& key) {
  const toml::node* node = root.get(key);
  if (node == nullptr) return nullptr;
  if (!node->is_table()) {
    throw ConfigError(fmt::format("[{}] must be a table (line {})", key,
                                  node->source().begin.line));
  }
  return node->as_table();
}

template <typename F>
auto Wrap(F&& parse, const std::string& what) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", what, e.what()));
  } catch (const StructuralError& e) {
    throw ConfigError(fmt::format("{}: {}", what, e.what()));
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (input_sizes.empty() || depths.empty() || widths.empty()) {
    throw ConfigError("network grid must not be empty");
  }
  for (int v : input_sizes) {
    if (v <= 0) throw ConfigError("network.input_sizes must be positive");
  }
  for (int v : depths) {
    if (v <= 0) throw ConfigError("network.depths must be positive");
  }
  for (int v : widths) {
    if (v <= 0) throw ConfigError("network.widths must be positive");
  }
  if (!(time_limit > 0.0)) throw ConfigError("time_limit must be positive");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (methods.empty() || granularities.empty() || rates.empty() || finetune.empty()) {
    throw ConfigError("pruning grid must not be empty");
  }
  for (double r : rates) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("pruning.rates must lie in [0, 1)");
  }
  if (schedule.rounds < 1 || schedule.epochs_per_round < 0) {
    throw ConfigError("pruning.rounds must be at least 1");
  }
  if (pool_size < 0) throw ConfigError("solver.pool_size must be nonnegative");
  if (!(gap_tolerance >= 0.0)) throw ConfigError("solver.gap_tolerance must be >= 0");
  if (training.epochs < 0 || training.batch_size < 1 || !(training.learning_rate > 0)) {
    throw ConfigError("training settings out of range");
  }
  if (study == StudyKind::kVerification) {
    if (!(eps_lo >= 0.0 && eps_lo <= eps_hi && std::isfinite(eps_hi))) {
      throw ConfigError("eps_range must be [lo, hi] with 0 <= lo <= hi");
    }
    if (classes < 2) throw ConfigError("network.classes must be at least 2");
    if (datasets.empty()) throw ConfigError("at least one dataset is required");
    std::set<std::string> names;
    for (const DatasetSource& d : datasets) {
      if (!names.insert(d.name).second) {
        throw ConfigError(fmt::format("duplicate dataset name '{}'", d.name));
      }
      if (d.train_samples < 1 || d.test_samples < 1) {
        throw ConfigError(fmt::format("dataset '{}' needs train and test samples", d.name));
      }
      if (d.idx && (d.images.empty() || d.labels.empty())) {
        throw ConfigError(fmt::format("dataset '{}' needs images and labels", d.name));
      }
      if (d.idx) {
        for (int n0 : input_sizes) {
          const int side = static_cast<int>(std::lround(std::sqrt(n0)));
          if (side * side != n0) {
            throw ConfigError("idx datasets need square input sizes");
          }
        }
      }
    }
  } else if (std::find(finetune.begin(), finetune.end(), true) != finetune.end()) {
    throw ConfigError("maximization studies have no data to finetune on");
  }
}

std::vector<PruningSpec> ExperimentConfig::PruningGrid() const {
  std::vector<PruningSpec> grid;
  for (PruneMethod m : methods) {
    for (Granularity g : granularities) {
      for (double r : rates) {
        for (bool ft : finetune) {
          PruningSpec spec;
          spec.method = m;
          spec.granularity = g;
          spec.rate = r;
          if (ft) {
            FinetuneSchedule s = schedule;
            s.learning_rate = training.learning_rate;
            s.batch_size = training.batch_size;
            spec.finetune = s;
          }
          grid.push_back(spec);
        }
      }
    }
  }
  return grid;
}

SolverConfig ExperimentConfig::DirectSolver() const {
  SolverConfig c;
  c.time_limit_seconds = time_limit;
  c.gap_tolerance = gap_tolerance;
  c.pool_size = pool_size;
  c.emphasis = direct_emphasis;
  c.node_order = node_order;
  c.warm_start = warm_start;
  return c;
}

SolverConfig ExperimentConfig::SurrogateSolver() const {
  SolverConfig c = DirectSolver();
  c.emphasis = surrogate_emphasis.value_or(
      study == StudyKind::kMaximization ? Emphasis::kFeasibility : direct_emphasis);
  return c;
}

ExperimentConfig ParseExperimentConfig(const std::string& text,
                                       const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source, e.source().begin.line,
                                  e.description()));
  }
  CheckKeys(root,
            {"study", "output_dir", "seeds", "time_limit", "workers", "eps_range",
             "network", "dataset", "training", "pruning", "solver"},
            source);

  ExperimentConfig c;
  c.study = Wrap([&] { return ParseStudyKind(Get<std::string>(root, "study", "verification", "")); },
                 "study");
  c.output_dir = Get<std::string>(root, "output_dir", c.output_dir, "");
  if (root.get("seeds") != nullptr) {
    c.seeds.clear();
    for (int64_t s : GetList<int64_t>(root, "seeds", {}, "")) {
      if (s < 0) throw ConfigError("seeds must be nonnegative");
      c.seeds.push_back(static_cast<uint64_t>(s));
    }
  }
  c.time_limit = Get<double>(root, "time_limit", c.time_limit, "");
  c.workers = static_cast<int>(Get<int64_t>(root, "workers", c.workers, ""));
  const std::vector<double> eps = GetList<double>(root, "eps_range", {c.eps_lo, c.eps_hi}, "");
  if (eps.size() != 2) throw ConfigError("eps_range must hold exactly two numbers");
  c.eps_lo = eps[0];
  c.eps_hi = eps[1];

  if (const toml::table* net = Section(root, "network")) {
    CheckKeys(*net, {"input_sizes", "depths", "widths", "classes"}, "network");
    const auto ints = [&](const char* key, const std::vector<int>& fallback) {
      std::vector<int64_t> wide(fallback.begin(), fallback.end());
      wide = GetList<int64_t>(*net, key, wide, "network");
      return std::vector<int>(wide.begin(), wide.end());
    };
    c.input_sizes = ints("input_sizes", c.input_sizes);
    c.depths = ints("depths", c.depths);
    c.widths = ints("widths", c.widths);
    c.classes = static_cast<int>(Get<int64_t>(*net, "classes", c.classes, "network"));
  }

  if (const toml::node* node = root.get("dataset")) {
    const toml::array* list = node->as_array();
    if (list == nullptr || !list->is_array_of_tables()) {
      throw ConfigError("dataset must be written as [[dataset]] tables");
    }
    c.datasets.clear();
    for (const toml::node& item : *list) {
      const toml::table& t = *item.as_table();
      CheckKeys(t,
                {"name", "source", "images", "labels", "train_samples", "test_samples",
                 "center_spread", "noise"},
                "dataset");
      DatasetSource d;
      d.name = Get<std::string>(t, "name", fmt::format("dataset{}", c.datasets.size()),
                                "dataset");
      const std::string kind = Get<std::string>(t, "source", "synthetic", "dataset");
      if (kind != "synthetic" && kind != "idx") {
        throw ConfigError(fmt::format("dataset.source '{}' is not synthetic or idx", kind));
      }
      d.idx = kind == "idx";
      d.images = Get<std::string>(t, "images", "", "dataset");
      d.labels = Get<std::string>(t, "labels", "", "dataset");
      d.train_samples =
          static_cast<int>(Get<int64_t>(t, "train_samples", d.train_samples, "dataset"));
      d.test_samples =
          static_cast<int>(Get<int64_t>(t, "test_samples", d.test_samples, "dataset"));
      d.blobs.center_spread = Get<double>(t, "center_spread", d.blobs.center_spread, "dataset");
      d.blobs.noise = Get<double>(t, "noise", d.blobs.noise, "dataset");
      c.datasets.push_back(d);
    }
  }

  if (const toml::table* t = Section(root, "training")) {
    CheckKeys(*t, {"epochs", "learning_rate", "batch_size"}, "training");
    c.training.epochs = static_cast<int>(Get<int64_t>(*t, "epochs", c.training.epochs, "training"));
    c.training.learning_rate =
        Get<double>(*t, "learning_rate", c.training.learning_rate, "training");
    c.training.batch_size =
        static_cast<int>(Get<int64_t>(*t, "batch_size", c.training.batch_size, "training"));
  }

  if (const toml::table* t = Section(root, "pruning")) {
    CheckKeys(*t, {"methods", "granularities", "rates", "finetune", "rounds", "epochs_per_round"},
              "pruning");
    if (t->get("methods") != nullptr) {
      c.methods.clear();
      for (const std::string& m : GetList<std::string>(*t, "methods", {}, "pruning")) {
        c.methods.push_back(Wrap([&] { return ParsePruneMethod(m); }, "pruning.methods"));
      }
    }
    if (t->get("granularities") != nullptr) {
      c.granularities.clear();
      for (const std::string& g : GetList<std::string>(*t, "granularities", {}, "pruning")) {
        c.granularities.push_back(Wrap([&] { return ParseGranularity(g); }, "pruning.granularities"));
      }
    }
    c.rates = GetList<double>(*t, "rates", c.rates, "pruning");
    c.finetune = GetList<bool>(*t, "finetune", c.finetune, "pruning");
    c.schedule.rounds = static_cast<int>(Get<int64_t>(*t, "rounds", c.schedule.rounds, "pruning"));
    c.schedule.epochs_per_round = static_cast<int>(
        Get<int64_t>(*t, "epochs_per_round", c.schedule.epochs_per_round, "pruning"));
  }

  if (const toml::table* t = Section(root, "solver")) {
    CheckKeys(*t,
              {"emphasis", "surrogate_emphasis", "node_order", "pool_size", "gap_tolerance",
               "warm_start"},
              "solver");
    c.direct_emphasis = Wrap(
        [&] { return ParseEmphasis(Get<std::string>(*t, "emphasis", "balanced", "solver")); },
        "solver.emphasis");
    if (t->get("surrogate_emphasis") != nullptr) {
      c.surrogate_emphasis = Wrap(
          [&] {
            return ParseEmphasis(Get<std::string>(*t, "surrogate_emphasis", "", "solver"));
          },
          "solver.surrogate_emphasis");
    }
    c.node_order = Wrap(
        [&] {
          return ParseNodeOrder(
              Get<std::string>(*t, "node_order", "depth-first-hybrid", "solver"));
        },
        "solver.node_order");
    c.pool_size = static_cast<int>(Get<int64_t>(*t, "pool_size", c.pool_size, "solver"));
    c.gap_tolerance = Get<double>(*t, "gap_tolerance", c.gap_tolerance, "solver");
    c.warm_start = Get<bool>(*t, "warm_start", c.warm_start, "solver");
  }

  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open", path));
  std::ostringstream text;
  text << in.rdbuf();
  return ParseExperimentConfig(text.str(), path);
}

}  // namespace nnsur
