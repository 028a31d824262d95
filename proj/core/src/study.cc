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

#include "nnsur/study.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

namespace nnsur {
namespace {

uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string Cell(double v) { return std::isnan(v) ? "" : FormatDouble(v); }
double ParseCell(const std::string& s) { return s.empty() ? kNotAvailable : ParseDouble(s); }

int64_t ParseInt(const std::string& s) {
  try {
    size_t used = 0;
    const int64_t v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError(fmt::format("'{}' is not an integer", s));
  }
}

struct InstanceOutput {
  std::vector<RunRecord> records;
  std::vector<RunRow> runs;
  std::optional<std::string> skip_reason;
};

RunRecord BaseRecord(const ExperimentConfig& config, const InstanceSpec& spec) {
  RunRecord r;
  r.instance_id = spec.id;
  r.study = config.study;
  r.dataset = spec.dataset;
  r.n0 = spec.n0;
  r.depth = spec.depth;
  r.width = spec.width;
  r.seed = spec.seed;
  return r;
}

void FillPruning(RunRecord& r, const PruningSpec& p) {
  r.method = ToString(p.method);
  r.granularity = ToString(p.granularity);
  r.rate = p.rate;
  r.finetune = p.finetune.has_value();
  r.config = p.Label();
}

std::vector<int> Dims(const InstanceSpec& spec, int outputs) {
  std::vector<int> dims{spec.n0};
  for (int l = 0; l < spec.depth; ++l) dims.push_back(spec.width);
  dims.push_back(outputs);
  return dims;
}

class Notifier {
 public:
  Notifier(const StudyOptions& options, std::mutex& mu) : options_(options), mu_(mu) {}
  void operator()(const InstanceSpec& spec, const std::string& config, const Network& dense,
                  const VerificationInstance* instance, const SurrogateResult& result) const {
    if (!options_.on_solve) return;
    std::lock_guard<std::mutex> lock(mu_);
    options_.on_solve(SolveEvent{spec, config, dense, instance, result});
  }

 private:
  const StudyOptions& options_;
  std::mutex& mu_;
};

InstanceOutput RunVerificationInstance(const ExperimentConfig& config,
                                       const InstanceSpec& spec, const Notifier& notify) {
  InstanceOutput out;
  const DatasetSource& source = config.datasets[spec.dataset_index];
  const Dataset data =
      StudyDataset(source, spec.n0, config.classes, spec.seed, spec.dataset_index);
  const Dataset train = data.Head(source.train_samples);
  const Dataset test = data.Slice(source.train_samples, source.test_samples);

  TrainOptions topts = config.training;
  topts.seed = spec.seed;
  const Network initial = RandomInit(Dims(spec, data.num_classes), spec.seed, data.box);
  const Network dense = Train(initial, train, topts);
  const double accuracy = Accuracy(dense, test);

  int sample = -1;
  Eigen::VectorXd y;
  for (int s = 0; s < test.size(); ++s) {
    y = Evaluate(dense, test.inputs.col(s));
    const int label = test.labels[s];
    bool strict = true;
    for (int k = 0; k < y.size(); ++k) {
      if (k != label && !(y[label] > y[k])) strict = false;
    }
    if (strict) {
      sample = s;
      break;
    }
  }
  if (sample < 0) {
    out.skip_reason = "no correctly classified test sample";
    return out;
  }
  const int j = test.labels[sample];
  const int jp = RunnerUp(y, j);
  const double eps = DrawEps(config, source, spec.n0, spec.seed);
  const VerificationInstance instance(dense, test.inputs.col(sample), eps, j, jp);

  const SurrogateResult direct = VerifyDirect(instance, config.DirectSolver());
  notify(spec, "direct", dense, &instance, direct);
  const SolveSummary direct_summary = Summarize(direct);
  out.runs.push_back({spec.id, "direct", direct_summary, 0.0});

  for (PruningSpec p : config.PruningGrid()) {
    p.seed = spec.seed;
    const PruneResult pruned = PruneDetailed(dense, p, &train);
    const SurrogateResult sur =
        VerifyViaSurrogate(instance, pruned.network, config.SurrogateSolver());
    notify(spec, p.Label(), dense, &instance, sur);
    RunRecord r = BaseRecord(config, spec);
    FillPruning(r, p);
    r.sample = sample;
    r.eps = eps;
    r.j = j;
    r.j_prime = jp;
    r.dense_accuracy = accuracy;
    r.pruned_accuracy = Accuracy(pruned.network, test);
    r.direct = direct_summary;
    r.surrogate = Summarize(sur);
    r.finetune_time = pruned.finetune_seconds;
    out.runs.push_back({spec.id, r.config, r.surrogate, r.finetune_time});
    out.records.push_back(std::move(r));
  }
  return out;
}

InstanceOutput RunMaximizationInstance(const ExperimentConfig& config,
                                       const InstanceSpec& spec, const Notifier& notify) {
  InstanceOutput out;
  const Network dense = RandomInit(Dims(spec, 1), spec.seed);
  const SurrogateResult direct = MaximizeDirect(dense, config.DirectSolver());
  notify(spec, "direct", dense, nullptr, direct);
  const SolveSummary direct_summary = Summarize(direct);
  out.runs.push_back({spec.id, "direct", direct_summary, 0.0});
  for (PruningSpec p : config.PruningGrid()) {
    p.seed = spec.seed;
    const PruneResult pruned = PruneDetailed(dense, p, nullptr);
    const SurrogateResult sur =
        MaximizeViaSurrogate(dense, pruned.network, config.SurrogateSolver());
    notify(spec, p.Label(), dense, nullptr, sur);
    RunRecord r = BaseRecord(config, spec);
    FillPruning(r, p);
    r.direct = direct_summary;
    r.surrogate = Summarize(sur);
    r.finetune_time = pruned.finetune_seconds;
    out.runs.push_back({spec.id, r.config, r.surrogate, r.finetune_time});
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<InstanceSpec> EnumerateInstances(const ExperimentConfig& config) {
  std::vector<InstanceSpec> out;
  const bool verify = config.study == StudyKind::kVerification;
  const int datasets = verify ? static_cast<int>(config.datasets.size()) : 1;
  for (int d = 0; d < datasets; ++d) {
    for (int n0 : config.input_sizes) {
      for (int depth : config.depths) {
        for (int width : config.widths) {
          for (uint64_t seed : config.seeds) {
            InstanceSpec spec;
            spec.id = static_cast<int>(out.size());
            spec.dataset = verify ? config.datasets[d].name : "";
            spec.dataset_index = d;
            spec.n0 = n0;
            spec.depth = depth;
            spec.width = width;
            spec.seed = seed;
            out.push_back(spec);
          }
        }
      }
    }
  }
  return out;
}

Dataset StudyDataset(const DatasetSource& source, int n0, int classes, uint64_t seed,
                     int dataset_index) {
  const int total = source.train_samples + source.test_samples;
  if (source.idx) {
    const int side = static_cast<int>(std::lround(std::sqrt(n0)));
    Dataset data = LoadIdxDataset(source.images, source.labels, total, side);
    if (data.size() < total) {
      throw IdxFormatError(fmt::format("{} holds only {} samples, {} needed", source.images,
                                       data.size(), total));
    }
    return data;
  }
  const uint64_t data_seed =
      Mix(Mix(seed) ^ Mix(static_cast<uint64_t>(dataset_index) + 1) ^ static_cast<uint64_t>(n0));
  return MakeSyntheticClassification(n0, classes, total, data_seed, source.blobs);
}

double DrawEps(const ExperimentConfig& config, const DatasetSource& source, int n0,
               uint64_t seed) {
  std::mt19937_64 rng(Mix(seed));
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double eps = config.eps_lo + u * (config.eps_hi - config.eps_lo);
  return source.idx ? eps : eps * n0 / 784.0;
}

SolveSummary Summarize(const SurrogateResult& result) {
  SolveSummary s;
  s.status = ToString(result.solver_status);
  s.outcome = ToString(result.outcome);
  if (result.x) s.objective = result.value;
  s.incumbents = result.incumbents_evaluated;
  s.nodes = result.stats.nodes_explored;
  s.binaries = result.binaries;
  s.time = result.wall_time;
  return s;
}

StudyResult RunStudy(const ExperimentConfig& config, const StudyOptions& options) {
  config.Validate();
  StudyResult result;
  result.instances = EnumerateInstances(config);
  const size_t count = result.instances.size();
  std::vector<std::optional<InstanceOutput>> outputs(count);
  std::atomic<size_t> next{0};
  std::mutex mu;  // guards failures and the log
  std::mutex event_mu;
  const Notifier notify(options, event_mu);

  const auto worker = [&] {
    while (true) {
      const size_t k = next++;
      if (k >= count) return;
      const InstanceSpec& spec = result.instances[k];
      const std::string label = fmt::format(
          "instance {} ({}n0={} depth={} width={} seed={})", spec.id,
          spec.dataset.empty() ? "" : spec.dataset + " ", spec.n0, spec.depth, spec.width,
          spec.seed);
      try {
        InstanceOutput out = config.study == StudyKind::kVerification
                                 ? RunVerificationInstance(config, spec, notify)
                                 : RunMaximizationInstance(config, spec, notify);
        std::lock_guard<std::mutex> lock(mu);
        if (options.log != nullptr) {
          if (out.skip_reason) {
            *options.log << label << ": skipped, " << *out.skip_reason << "\n";
          } else {
            *options.log << label << ":";
            for (const RunRow& run : out.runs) {
              *options.log << fmt::format(" {}={}/{:.3f}s", run.config, run.solve.outcome,
                                          run.solve.time);
            }
            *options.log << "\n";
          }
          options.log->flush();
        }
        outputs[k] = std::move(out);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        result.failures.push_back({spec.id, e.what()});
        if (options.log != nullptr) *options.log << label << ": failed, " << e.what() << "\n";
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(options.workers.value_or(config.workers),
                                static_cast<int>(std::max<size_t>(count, 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (size_t k = 0; k < count; ++k) {
    if (!outputs[k]) continue;
    InstanceOutput& out = *outputs[k];
    if (out.skip_reason) {
      result.skipped.push_back({result.instances[k].id, *out.skip_reason});
      continue;
    }
    for (RunRecord& r : out.records) result.records.push_back(std::move(r));
    for (RunRow& r : out.runs) result.runs.push_back(std::move(r));
  }
  std::sort(result.failures.begin(), result.failures.end(),
            [](const InstanceNote& a, const InstanceNote& b) {
              return a.instance_id < b.instance_id;
            });
  return result;
}

StudyResult RunVerificationStudy(const ExperimentConfig& config,
                                 const StudyOptions& options) {
  if (config.study != StudyKind::kVerification) {
    throw ConfigError("config does not describe a verification study");
  }
  return RunStudy(config, options);
}

StudyResult RunMaximizationStudy(const ExperimentConfig& config,
                                 const StudyOptions& options) {
  if (config.study != StudyKind::kMaximization) {
    throw ConfigError("config does not describe a maximization study");
  }
  return RunStudy(config, options);
}

namespace {

const CsvRow kRecordHeader{
    "instance_id",      "study",              "dataset",           "n0",
    "depth",            "width",              "seed",              "sample",
    "eps",              "j",                  "j_prime",           "method",
    "granularity",      "rate",               "finetune",          "config",
    "dense_accuracy",   "pruned_accuracy",    "direct_status",     "direct_outcome",
    "direct_objective", "direct_incumbents",  "direct_nodes",      "direct_binaries",
    "direct_time",      "surrogate_status",   "surrogate_outcome", "surrogate_objective",
    "surrogate_incumbents", "surrogate_nodes", "surrogate_binaries", "surrogate_time",
    "finetune_time"};

void AppendSolve(CsvRow& row, const SolveSummary& s) {
  row.push_back(s.status);
  row.push_back(s.outcome);
  row.push_back(Cell(s.objective));
  row.push_back(std::to_string(s.incumbents));
  row.push_back(std::to_string(s.nodes));
  row.push_back(std::to_string(s.binaries));
  row.push_back(FormatDouble(s.time));
}

SolveSummary ReadSolve(const CsvTable& t, size_t i, const std::string& prefix) {
  SolveSummary s;
  s.status = t.Get(i, prefix + "_status");
  s.outcome = t.Get(i, prefix + "_outcome");
  s.objective = ParseCell(t.Get(i, prefix + "_objective"));
  s.incumbents = ParseInt(t.Get(i, prefix + "_incumbents"));
  s.nodes = ParseInt(t.Get(i, prefix + "_nodes"));
  s.binaries = static_cast<int>(ParseInt(t.Get(i, prefix + "_binaries")));
  s.time = ParseDouble(t.Get(i, prefix + "_time"));
  return s;
}

}  // namespace

CsvTable RecordsTable(const std::vector<RunRecord>& records) {
  CsvTable t;
  t.header = kRecordHeader;
  for (const RunRecord& r : records) {
    CsvRow row{std::to_string(r.instance_id),
               ToString(r.study),
               r.dataset,
               std::to_string(r.n0),
               std::to_string(r.depth),
               std::to_string(r.width),
               std::to_string(r.seed),
               r.sample >= 0 ? std::to_string(r.sample) : "",
               Cell(r.eps),
               r.j >= 0 ? std::to_string(r.j) : "",
               r.j_prime >= 0 ? std::to_string(r.j_prime) : "",
               r.method,
               r.granularity,
               FormatDouble(r.rate),
               r.finetune ? "true" : "false",
               r.config,
               Cell(r.dense_accuracy),
               Cell(r.pruned_accuracy)};
    AppendSolve(row, r.direct);
    AppendSolve(row, r.surrogate);
    row.push_back(FormatDouble(r.finetune_time));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<RunRecord> ReadRecords(const CsvTable& t) {
  std::vector<RunRecord> out;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    RunRecord r;
    r.instance_id = static_cast<int>(ParseInt(t.Get(i, "instance_id")));
    try {
      r.study = ParseStudyKind(t.Get(i, "study"));
    } catch (const ConfigError& e) {
      throw CsvError(e.what());
    }
    r.dataset = t.Get(i, "dataset");
    r.n0 = static_cast<int>(ParseInt(t.Get(i, "n0")));
    r.depth = static_cast<int>(ParseInt(t.Get(i, "depth")));
    r.width = static_cast<int>(ParseInt(t.Get(i, "width")));
    r.seed = static_cast<uint64_t>(ParseInt(t.Get(i, "seed")));
    const std::string& sample = t.Get(i, "sample");
    r.sample = sample.empty() ? -1 : static_cast<int>(ParseInt(sample));
    r.eps = ParseCell(t.Get(i, "eps"));
    const std::string& j = t.Get(i, "j");
    r.j = j.empty() ? -1 : static_cast<int>(ParseInt(j));
    const std::string& jp = t.Get(i, "j_prime");
    r.j_prime = jp.empty() ? -1 : static_cast<int>(ParseInt(jp));
    r.method = t.Get(i, "method");
    r.granularity = t.Get(i, "granularity");
    r.rate = ParseDouble(t.Get(i, "rate"));
    r.finetune = t.Get(i, "finetune") == "true";
    r.config = t.Get(i, "config");
    r.dense_accuracy = ParseCell(t.Get(i, "dense_accuracy"));
    r.pruned_accuracy = ParseCell(t.Get(i, "pruned_accuracy"));
    r.direct = ReadSolve(t, i, "direct");
    r.surrogate = ReadSolve(t, i, "surrogate");
    r.finetune_time = ParseDouble(t.Get(i, "finetune_time"));
    out.push_back(std::move(r));
  }
  return out;
}

CsvTable RunsTable(const std::vector<RunRow>& runs) {
  CsvTable t;
  t.header = {"instance_id", "config",   "status",   "outcome",     "objective",
              "incumbents",  "nodes",    "binaries", "time",        "finetune_time"};
  for (const RunRow& r : runs) {
    CsvRow row{std::to_string(r.instance_id), r.config};
    AppendSolve(row, r.solve);
    row.push_back(FormatDouble(r.finetune_time));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void WriteStudyOutputs(const ExperimentConfig& config, const StudyResult& result,
                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  WriteCsvFile((base / "records.csv").string(), RecordsTable(result.records));
  WriteCsvFile((base / "runs.csv").string(), RunsTable(result.runs));

  CsvTable notes;
  notes.header = {"instance_id", "kind", "message"};
  for (const InstanceNote& n : result.skipped) {
    notes.rows.push_back({std::to_string(n.instance_id), "skipped", n.message});
  }
  for (const InstanceNote& n : result.failures) {
    notes.rows.push_back({std::to_string(n.instance_id), "failed", n.message});
  }
  WriteCsvFile((base / "skipped.csv").string(), notes);

  const SolverConfig direct = config.DirectSolver();
  const SolverConfig surrogate = config.SurrogateSolver();
  CsvTable settings;
  settings.header = {"key", "value"};
  settings.rows = {
      {"study", ToString(config.study)},
      {"instances", std::to_string(result.instances.size())},
      {"time_limit", FormatDouble(config.time_limit)},
      {"direct_emphasis", ToString(direct.emphasis)},
      {"surrogate_emphasis", ToString(surrogate.emphasis)},
      {"node_order", ToString(direct.node_order)},
      {"pool_size", std::to_string(direct.pool_size)},
      {"gap_tolerance", FormatDouble(direct.gap_tolerance)},
      {"warm_start", direct.warm_start ? "true" : "false"},
      {"target_class", "runner-up of the dense prediction at x0"},
      {"sample_rule", "first strictly correctly classified test sample"},
      {"emphasis_note",
       "feasibility emphasis and the solution pool are engine-specific analogues of "
       "a commercial solver's solution-focus settings"},
  };
  WriteCsvFile((base / "settings.csv").string(), settings);
}

}  // namespace nnsur
