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

// nnsur: train, prune, verify and maximise ReLU networks, and run
// direct-versus-surrogate studies.
//
// Exit codes: 0 success, 1 configuration or input error, 2 runtime failure,
// 3 study finished with failed instances.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nnsur/bounds.h"
#include "nnsur/config.h"
#include "nnsur/encoder.h"
#include "nnsur/lp_format.h"
#include "nnsur/network_io.h"
#include "nnsur/pruning.h"
#include "nnsur/study.h"
#include "nnsur/summary.h"
#include "nnsur/surrogate.h"

namespace nnsur {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

// Thrown for bad flag combinations.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::optional<uint64_t> seed;
  std::optional<double> time_limit;
  std::string config;
};

void AddCommon(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--time-limit", f.time_limit, "Seconds per solve")->check(CLI::PositiveNumber);
  app->add_option("--config", f.config, "TOML configuration file")->check(CLI::ExistingFile);
}

std::optional<ExperimentConfig> MaybeConfig(const CommonFlags& f) {
  if (f.config.empty()) return std::nullopt;
  return LoadExperimentConfig(f.config);
}

struct DataFlags {
  std::string source = "synthetic";
  int samples = 600;
  std::optional<uint64_t> data_seed;
  double center_spread = SyntheticBlobOptions{}.center_spread;
  double noise = SyntheticBlobOptions{}.noise;
  int classes = 10;
  std::string images;
  std::string labels;
};

void AddData(CLI::App* app, DataFlags& d) {
  app->add_option("--data", d.source, "synthetic or idx")
      ->check(CLI::IsMember({"synthetic", "idx"}));
  app->add_option("--samples", d.samples, "Number of samples")->check(CLI::PositiveNumber);
  app->add_option("--data-seed", d.data_seed, "Seed of the synthetic data (default: --seed)");
  app->add_option("--center-spread", d.center_spread, "Synthetic class-centre spread");
  app->add_option("--noise", d.noise, "Synthetic noise level");
  app->add_option("--classes", d.classes, "Synthetic class count");
  app->add_option("--idx-images", d.images, "IDX image file")->check(CLI::ExistingFile);
  app->add_option("--idx-labels", d.labels, "IDX label file")->check(CLI::ExistingFile);
}

Dataset LoadData(const DataFlags& d, int n0, uint64_t seed) {
  if (d.source == "idx") {
    if (d.images.empty() || d.labels.empty()) {
      throw UsageError("--data idx needs --idx-images and --idx-labels");
    }
    const int side = static_cast<int>(std::lround(std::sqrt(n0)));
    if (side * side != n0) throw UsageError("IDX data needs a square input size");
    return LoadIdxDataset(d.images, d.labels, d.samples, side);
  }
  SyntheticBlobOptions blobs;
  blobs.center_spread = d.center_spread;
  blobs.noise = d.noise;
  return MakeSyntheticClassification(n0, d.classes, d.samples, d.data_seed.value_or(seed),
                                     blobs);
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("'{}' is not a number", item));
    }
  }
  return out;
}

// ---- train ---------------------------------------------------------------

struct TrainFlags {
  CommonFlags common;
  DataFlags data;
  std::string dims;
  std::string out;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<int> batch_size;
  bool random = false;
  std::string domain = "-1,1";
};

int RunTrain(const TrainFlags& f) {
  std::vector<int> dims;
  for (double v : ParseList(f.dims)) dims.push_back(static_cast<int>(v));
  if (dims.size() < 2) throw UsageError("--dims needs at least two sizes");
  const uint64_t seed = f.common.seed.value_or(0);
  if (f.random) {
    const std::vector<double> domain = ParseList(f.domain);
    if (domain.size() != 2 || !(domain[0] < domain[1])) {
      throw UsageError("--domain must be lo,hi with lo < hi");
    }
    const Network net = RandomInit(dims, seed, Box::Uniform(dims[0], domain[0], domain[1]));
    SaveNetwork(net, f.out);
    std::cout << fmt::format("initialised {} parameters -> {}\n", net.weight_count(), f.out);
    return kExitOk;
  }
  TrainOptions opts;
  if (auto config = MaybeConfig(f.common)) opts = config->training;
  if (f.epochs) opts.epochs = *f.epochs;
  if (f.learning_rate) opts.learning_rate = *f.learning_rate;
  if (f.batch_size) opts.batch_size = *f.batch_size;
  opts.seed = seed;
  const Dataset data = LoadData(f.data, dims[0], seed);
  if (data.num_classes != dims.back()) {
    throw UsageError(fmt::format("data has {} classes but the output layer has {}",
                                 data.num_classes, dims.back()));
  }
  const Network trained = Train(RandomInit(dims, seed, data.box), data, opts);
  SaveNetwork(trained, f.out);
  std::cout << fmt::format("loss {:.6f} accuracy {:.4f} -> {}\n", Loss(trained, data),
                           Accuracy(trained, data), f.out);
  return kExitOk;
}

// ---- prune ---------------------------------------------------------------

struct PruneFlags {
  CommonFlags common;
  DataFlags data;
  std::string in;
  std::string out;
  std::string method = "mp";
  std::string granularity = "unstructured";
  double rate = 0.8;
  bool finetune = false;
  FinetuneSchedule schedule;
};

int RunPrune(const PruneFlags& f) {
  const Network dense = LoadNetwork(f.in);
  PruningSpec spec;
  spec.method = ParsePruneMethod(f.method);
  spec.granularity = ParseGranularity(f.granularity);
  spec.rate = f.rate;
  spec.seed = f.common.seed.value_or(0);
  std::optional<Dataset> data;
  if (f.finetune) {
    spec.finetune = f.schedule;
    data = LoadData(f.data, dense.input_size(), spec.seed);
  }
  spec.Validate();
  const PruneResult result = PruneDetailed(dense, spec, data ? &*data : nullptr);
  SaveNetwork(result.network, f.out);
  std::cout << fmt::format("{}: {} of {} weights nonzero, dims [{}], finetune {:.3f}s -> {}\n",
                           spec.Label(), result.network.nonzero_weight_count(),
                           dense.weight_count(), fmt::join(result.network.dims, ","),
                           result.finetune_seconds, f.out);
  return kExitOk;
}

// ---- verify / maximize ---------------------------------------------------

struct SolveFlags {
  CommonFlags common;
  DataFlags data;
  std::string net;
  std::string surrogate;
  std::string x0;
  int sample = -1;
  double eps = 0.1;
  std::optional<int> j;
  std::optional<int> j_prime;
  std::string emphasis;
  std::optional<int> pool_size;
  bool cold = false;
  std::string lp_out;
  std::string node_log;
  std::string bounds_out;
  std::string x_out;
};

SolverConfig MakeSolverConfig(const SolveFlags& f, bool surrogate_run, bool maximize) {
  SolverConfig c;
  if (auto config = MaybeConfig(f.common)) {
    config->study = maximize ? StudyKind::kMaximization : StudyKind::kVerification;
    c = surrogate_run ? config->SurrogateSolver() : config->DirectSolver();
  } else if (maximize && surrogate_run) {
    c.emphasis = Emphasis::kFeasibility;
  }
  if (f.common.time_limit) c.time_limit_seconds = *f.common.time_limit;
  if (!f.emphasis.empty()) c.emphasis = ParseEmphasis(f.emphasis);
  if (f.pool_size) c.pool_size = *f.pool_size;
  if (f.cold) c.warm_start = false;
  c.seed = f.common.seed.value_or(0);
  return c;
}

void PrintResult(const SurrogateResult& r, const std::string& x_out) {
  std::cout << fmt::format(
      "outcome {}\nsolver_status {}\nvalue {}\nbound {}\nwall_time {:.6f}\nincumbents {}\n"
      "accepted {}\nnodes {}\nlps {}\nbinaries {}\n",
      ToString(r.outcome), ToString(r.solver_status),
      r.x ? FormatDouble(r.value) : std::string("none"), FormatDouble(r.solver_bound),
      r.wall_time, r.incumbents_evaluated, r.incumbents_accepted, r.stats.nodes_explored,
      r.stats.lps_solved, r.binaries);
  if (r.x && !x_out.empty()) {
    std::ofstream out(x_out);
    std::vector<std::string> cells;
    for (double v : *r.x) cells.push_back(FormatDouble(v));
    out << fmt::format("{}\n", fmt::join(cells, ","));
  }
}

int RunVerify(const SolveFlags& f) {
  const Network dense = LoadNetwork(f.net);
  const Network sparse = f.surrogate.empty() ? dense : LoadNetwork(f.surrogate);
  Eigen::VectorXd x0;
  if (!f.x0.empty()) {
    const std::vector<double> values = ParseList(f.x0);
    x0 = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  } else if (f.sample >= 0) {
    const Dataset data = LoadData(f.data, dense.input_size(), f.common.seed.value_or(0));
    if (f.sample >= data.size()) throw UsageError("--sample is past the end of the data");
    x0 = data.inputs.col(f.sample);
  } else {
    throw UsageError("give --x0 or --sample");
  }
  if (x0.size() != dense.input_size()) throw UsageError("x0 has the wrong length");
  const Eigen::VectorXd y = Evaluate(dense, x0);
  const int j = f.j.value_or(ArgMax(y));
  const int jp = f.j_prime.value_or(RunnerUp(y, j));
  const VerificationInstance instance(dense, x0, f.eps, j, jp);

  if (!f.lp_out.empty() || !f.bounds_out.empty()) {
    const ActivationBounds bounds =
        IntervalPropagate(sparse, TightenToBall(sparse.domain, x0, f.eps));
    if (!f.lp_out.empty()) WriteLpFile(EncodeVnn(sparse, bounds, x0, f.eps, j, jp).model, f.lp_out);
    if (!f.bounds_out.empty()) std::ofstream(f.bounds_out) << BoundsToCsv(bounds);
  }
  std::ofstream log_file;
  SolverConfig config = MakeSolverConfig(f, !f.surrogate.empty(), false);
  if (!f.node_log.empty()) {
    log_file.open(f.node_log);
    config.node_log = &log_file;
  }
  const SurrogateResult r = f.surrogate.empty() ? VerifyDirect(instance, config)
                                                : VerifyViaSurrogate(instance, sparse, config);
  std::cout << fmt::format("class {} target {} eps {}\n", j, jp, FormatDouble(f.eps));
  PrintResult(r, f.x_out);
  return kExitOk;
}

int RunMaximize(const SolveFlags& f) {
  const Network dense = LoadNetwork(f.net);
  const Network sparse = f.surrogate.empty() ? dense : LoadNetwork(f.surrogate);
  if (!f.lp_out.empty()) WriteLpFile(EncodeFm(sparse).model, f.lp_out);
  if (!f.bounds_out.empty()) std::ofstream(f.bounds_out) << BoundsToCsv(IntervalPropagate(sparse));
  std::ofstream log_file;
  SolverConfig config = MakeSolverConfig(f, !f.surrogate.empty(), true);
  if (!f.node_log.empty()) {
    log_file.open(f.node_log);
    config.node_log = &log_file;
  }
  const SurrogateResult r = f.surrogate.empty() ? MaximizeDirect(dense, config)
                                                : MaximizeViaSurrogate(dense, sparse, config);
  PrintResult(r, f.x_out);
  return kExitOk;
}

// ---- study / summarize ---------------------------------------------------

struct StudyFlags {
  CommonFlags common;
  std::optional<int> workers;
  std::string out_dir;
  bool quiet = false;
};

int RunStudyVerb(const StudyFlags& f, StudyKind kind) {
  if (f.common.config.empty()) throw UsageError("study needs --config");
  ExperimentConfig config = LoadExperimentConfig(f.common.config);
  if (config.study != kind) {
    throw ConfigError(fmt::format("{} describes a {} study", f.common.config,
                                  ToString(config.study)));
  }
  if (f.common.seed) config.seeds = {*f.common.seed};
  if (f.common.time_limit) config.time_limit = *f.common.time_limit;
  if (f.workers) config.workers = *f.workers;
  if (!f.out_dir.empty()) config.output_dir = f.out_dir;
  config.Validate();
  StudyOptions options;
  options.log = f.quiet ? nullptr : &std::cerr;
  const StudyResult result = RunStudy(config, options);
  WriteStudyOutputs(config, result, config.output_dir);
  const std::vector<SummaryRow> summary =
      Summarize(ToComparisons(result.records), {"rate", "finetune"});
  WriteCsvRow(std::cout, SummaryTable(summary, {"rate", "finetune"}).header);
  for (const CsvRow& row : SummaryTable(summary, {"rate", "finetune"}).rows) {
    WriteCsvRow(std::cout, row);
  }
  std::cerr << fmt::format("{} instances, {} records, {} skipped, {} failed -> {}\n",
                           result.instances.size(), result.records.size(),
                           result.skipped.size(), result.failures.size(), config.output_dir);
  return result.failures.empty() ? kExitOk : kExitPartial;
}

struct SummarizeFlags {
  CommonFlags common;
  std::string input;
  std::string group_by = "rate,finetune";
  std::string out;
  std::string scatter;
};

int RunSummarize(const SummarizeFlags& f) {
  const CsvTable table = ReadCsvFile(f.input);
  const std::vector<Comparison> comparisons = ReadComparisons(table);
  std::vector<std::string> group_by;
  std::stringstream in(f.group_by);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) group_by.push_back(item);
  }
  const CsvTable summary = SummaryTable(Summarize(comparisons, group_by), group_by);
  if (f.out.empty()) {
    WriteCsvRow(std::cout, summary.header);
    for (const CsvRow& row : summary.rows) WriteCsvRow(std::cout, row);
  } else {
    WriteCsvFile(f.out, summary);
  }
  if (!f.scatter.empty()) WriteCsvFile(f.scatter, ScatterTable(comparisons));
  return kExitOk;
}

}  // namespace
}  // namespace nnsur

int main(int argc, char** argv) {
  using namespace nnsur;
  CLI::App app{"Optimisation over trained ReLU networks and their sparse surrogates"};
  app.require_subcommand(1);

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train (or randomly initialise) a network");
  AddCommon(train_cmd, train.common);
  AddData(train_cmd, train.data);
  train_cmd->add_option("--dims", train.dims, "Layer sizes, e.g. 36,16,16,10")->required();
  train_cmd->add_option("--out", train.out, "Output network JSON")->required();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--learning-rate", train.learning_rate, "SGD step size");
  train_cmd->add_option("--batch-size", train.batch_size, "Minibatch size");
  train_cmd->add_flag("--random", train.random, "Skip training; random initialisation only");
  train_cmd->add_option("--domain", train.domain, "Input box lo,hi for --random");

  PruneFlags prune;
  CLI::App* prune_cmd = app.add_subcommand("prune", "Prune a network");
  AddCommon(prune_cmd, prune.common);
  AddData(prune_cmd, prune.data);
  prune_cmd->add_option("--in", prune.in, "Dense network JSON")->required()->check(CLI::ExistingFile);
  prune_cmd->add_option("--out", prune.out, "Pruned network JSON")->required();
  prune_cmd->add_option("--method", prune.method, "mp or rp");
  prune_cmd->add_option("--granularity", prune.granularity, "unstructured or structured");
  prune_cmd->add_option("--rate", prune.rate, "Fraction removed per layer");
  prune_cmd->add_flag("--finetune", prune.finetune, "Iterative pruning with retraining");
  prune_cmd->add_option("--rounds", prune.schedule.rounds, "Finetuning rounds");
  prune_cmd->add_option("--epochs-per-round", prune.schedule.epochs_per_round,
                        "Retraining epochs per round");

  SolveFlags verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Search for an adversarial input");
  AddCommon(verify_cmd, verify.common);
  AddData(verify_cmd, verify.data);
  verify_cmd->add_option("--net", verify.net, "Dense network JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--surrogate", verify.surrogate, "Pruned network JSON")
      ->check(CLI::ExistingFile);
  verify_cmd->add_option("--x0", verify.x0, "Comma-separated input");
  verify_cmd->add_option("--sample", verify.sample, "Sample index in the data");
  verify_cmd->add_option("--eps", verify.eps, "L1 budget")->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--j", verify.j, "True class (default: predicted)");
  verify_cmd->add_option("--j-prime", verify.j_prime, "Target class (default: runner-up)");
  verify_cmd->add_option("--emphasis", verify.emphasis, "balanced or feasibility");
  verify_cmd->add_option("--pool-size", verify.pool_size, "Solution pool size");
  verify_cmd->add_flag("--cold", verify.cold, "Cold-start every LP");
  verify_cmd->add_option("--lp-out", verify.lp_out, "Write the MILP in LP format");
  verify_cmd->add_option("--node-log", verify.node_log, "Incumbent log CSV");
  verify_cmd->add_option("--bounds-out", verify.bounds_out, "Activation bounds CSV");
  verify_cmd->add_option("--x-out", verify.x_out, "Write the adversarial input");

  SolveFlags maximize;
  CLI::App* maximize_cmd = app.add_subcommand("maximize", "Maximise a single-output network");
  AddCommon(maximize_cmd, maximize.common);
  maximize_cmd->add_option("--net", maximize.net, "Dense network JSON")->required()->check(CLI::ExistingFile);
  maximize_cmd->add_option("--surrogate", maximize.surrogate, "Pruned network JSON")
      ->check(CLI::ExistingFile);
  maximize_cmd->add_option("--emphasis", maximize.emphasis, "balanced or feasibility");
  maximize_cmd->add_option("--pool-size", maximize.pool_size, "Solution pool size");
  maximize_cmd->add_flag("--cold", maximize.cold, "Cold-start every LP");
  maximize_cmd->add_option("--lp-out", maximize.lp_out, "Write the MILP in LP format");
  maximize_cmd->add_option("--node-log", maximize.node_log, "Incumbent log CSV");
  maximize_cmd->add_option("--bounds-out", maximize.bounds_out, "Activation bounds CSV");
  maximize_cmd->add_option("--x-out", maximize.x_out, "Write the best input");

  CLI::App* study_cmd = app.add_subcommand("study", "Run a direct-versus-surrogate study");
  study_cmd->require_subcommand(1);
  StudyFlags study_verify;
  CLI::App* sv = study_cmd->add_subcommand("verify", "Verification study");
  AddCommon(sv, study_verify.common);
  sv->add_option("--workers", study_verify.workers, "Concurrent instances")->check(CLI::PositiveNumber);
  sv->add_option("--out-dir", study_verify.out_dir, "Output directory");
  sv->add_flag("--quiet", study_verify.quiet, "No per-instance log");
  StudyFlags study_max;
  CLI::App* sm = study_cmd->add_subcommand("maximize", "Maximization study");
  AddCommon(sm, study_max.common);
  sm->add_option("--workers", study_max.workers, "Concurrent instances")->check(CLI::PositiveNumber);
  sm->add_option("--out-dir", study_max.out_dir, "Output directory");
  sm->add_flag("--quiet", study_max.quiet, "No per-instance log");

  SummarizeFlags summarize;
  CLI::App* summarize_cmd = app.add_subcommand("summarize", "Win percentages from study output");
  AddCommon(summarize_cmd, summarize.common);
  summarize_cmd->add_option("--input", summarize.input, "records.csv or scatter CSV")
      ->required()
      ->check(CLI::ExistingFile);
  summarize_cmd->add_option("--group-by", summarize.group_by,
                            "Comma-separated: dataset,n0,depth,width,method,granularity,rate,finetune");
  summarize_cmd->add_option("--out", summarize.out, "Summary CSV (default: stdout)");
  summarize_cmd->add_option("--scatter", summarize.scatter, "Also write scatter CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train_cmd->parsed()) return RunTrain(train);
    if (prune_cmd->parsed()) return RunPrune(prune);
    if (verify_cmd->parsed()) return RunVerify(verify);
    if (maximize_cmd->parsed()) return RunMaximize(maximize);
    if (sv->parsed()) return RunStudyVerb(study_verify, StudyKind::kVerification);
    if (sm->parsed()) return RunStudyVerb(study_max, StudyKind::kMaximization);
    if (summarize_cmd->parsed()) return RunSummarize(summarize);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IdxFormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
