// Copyright 2026 The fairsynth Authors.
//
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

#include "fairsynth/cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fairsynth/error.hpp"
#include "fairsynth/external.hpp"
#include "fairsynth/reports.hpp"

namespace fairsynth {

std::vector<std::string> ValidBackendNames(const std::vector<ExternalBackend>& externals) {
  std::vector<std::string> names{"gaussian_copula", "independent"};
  for (const auto& e : externals) names.push_back(e.name);
  return names;
}

void ResolveBackend(const std::string& name, const std::vector<ExternalBackend>& externals,
                    RunConfig& config) {
  if (name == "gaussian_copula") {
    config.backend = BackendKind::kGaussianCopula;
    config.external.reset();
    return;
  }
  if (name == "independent") {
    config.backend = BackendKind::kIndependent;
    config.external.reset();
    return;
  }
  for (const auto& e : externals) {
    if (e.name == name) {
      config.backend = BackendKind::kExternal;
      config.external = e;
      return;
    }
  }
  std::string list;
  for (const auto& n : ValidBackendNames(externals)) {
    if (!list.empty()) list += ", ";
    list += n;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown backend '" + name + "'; valid backends: " + list);
}

namespace {

struct Flags {
  std::string data;
  std::string metadata;
  std::string backend = "gaussian_copula";
  std::string backends;  // bench: comma-separated
  std::string backends_file;
  std::size_t train_rows = 1000;
  std::size_t sample_rows = 500;
  int epochs = 20;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.3;
  double parity_threshold = kDefaultParityThreshold;
  double min_score = 0.7;
  int max_refinements = 3;
  double shrinkage = 0.0;
  std::string out;
  std::string model;
  std::string synthetic;
  std::string quality;
  std::string fairness;
  std::size_t demo_rows = 2000;
  double disparity = 0.3;
};

void AddShared(CLI::App* cmd, Flags& f) {
  cmd->add_option("--data", f.data, "Input CSV (built-in demo table when omitted)");
  cmd->add_option("--metadata", f.metadata, "Metadata JSON for --data");
  cmd->add_option("--backend", f.backend, "Synthesizer backend")->capture_default_str();
  cmd->add_option("--backends-file", f.backends_file, "JSON list of external backends");
  cmd->add_option("--train-rows", f.train_rows, "Training rows")->capture_default_str();
  cmd->add_option("--sample-rows", f.sample_rows, "Synthetic rows")->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed (MEMISIS_SEED overrides)")->capture_default_str();
  cmd->add_option("--holdout-fraction", f.holdout_fraction, "Holdout fraction")
      ->capture_default_str();
  cmd->add_option("--parity-threshold", f.parity_threshold, "Max relative FPR target")
      ->capture_default_str();
  cmd->add_option("--min-score", f.min_score, "Target synth_score")->capture_default_str();
  cmd->add_option("--max-refinements", f.max_refinements, "Refinement budget")
      ->capture_default_str();
  cmd->add_option("--shrinkage", f.shrinkage, "Initial correlation shrinkage")
      ->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory");
}

std::uint64_t EffectiveSeed(std::uint64_t flag_seed) {
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0') return flag_seed;
  std::uint64_t value = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(kSeedEnvVar) + " must be an unsigned integer, got '" + env + "'");
  }
  return value;
}

std::vector<ExternalBackend> Externals(const Flags& f) {
  if (f.backends_file.empty()) return {};
  return LoadBackendsFile(f.backends_file);
}

struct Inputs {
  Dataset data;
  Metadata metadata;
  bool demo = false;
};

Inputs LoadInputs(const Flags& f) {
  Inputs in;
  if (f.data.empty()) {
    if (!f.metadata.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--metadata given without --data");
    }
    in.data = MakeDemoDataset(DemoSpec{});
    in.metadata = DemoMetadata();
    in.demo = true;
    return in;
  }
  if (f.metadata.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--data requires --metadata");
  }
  in.metadata = LoadMetadata(f.metadata);
  in.data = LoadDataset(f.data, in.metadata);
  return in;
}

RunConfig MakeConfig(const Flags& f, const std::vector<ExternalBackend>& externals,
                     const std::string& backend) {
  RunConfig config;
  ResolveBackend(backend, externals, config);
  config.train_rows = f.train_rows;
  config.sample_rows = f.sample_rows;
  config.epochs = f.epochs;
  config.seed = EffectiveSeed(f.seed);
  config.correlation_shrinkage = f.shrinkage;
  config.Validate();
  return config;
}

SplitSpec MakeSplit(const Flags& f, const RunConfig& config) {
  SplitSpec split;
  split.train_rows = config.train_rows;
  split.holdout_fraction = f.holdout_fraction;
  split.seed = config.seed;
  return split;
}

EvaluationOptions MakeOptions(const Flags& f) {
  EvaluationOptions options;
  options.parity_threshold = f.parity_threshold;
  return options;
}

std::filesystem::path RequireOut(const Flags& f) {
  if (f.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  return f.out;
}

nlohmann::ordered_json RunSummary(const std::string& command, const Inputs& in,
                                  const RunConfig& config, const SplitSpec& split,
                                  const CompositeScore& score) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["data"] = in.demo ? "demo" : "csv";
  doc["config"] = ConfigToJson(config);
  doc["split"] = {{"holdout_fraction", split.holdout_fraction}, {"seed", split.seed}};
  doc["scores"] = ScoreToJson(score);
  return doc;
}

void PrintScore(std::ostream& out, const CompositeScore& score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", score.synth_score);
  out << "synth_score " << buf << "\n";
  out << DumpFixed(ScoreToJson(score));
}

// ---------------------------------------------------------------------------

int CmdDemo(const Flags& f, std::ostream& out) {
  DemoSpec spec;
  spec.n_rows = f.demo_rows;
  spec.seed = EffectiveSeed(f.seed);
  spec.disparity_strength = f.disparity;
  const auto dir = RequireOut(f);
  std::filesystem::create_directories(dir);
  WriteCsv(MakeDemoDataset(spec), dir / "demo.csv");
  WriteTextFile(dir / "metadata.json", MetadataToJson(DemoMetadata()));
  out << "wrote " << (dir / "demo.csv").string() << " and "
      << (dir / "metadata.json").string() << "\n";
  return kExitOk;
}

int CmdFit(const Flags& f, std::ostream& out) {
  const auto externals = Externals(f);
  const RunConfig config = MakeConfig(f, externals, f.backend);
  if (config.backend == BackendKind::kExternal) {
    throw Error(ErrorCode::kInvalidArgument, "fit supports native backends only");
  }
  const auto dir = RequireOut(f);
  const Inputs in = LoadInputs(f);
  const Split parts = SplitHoldout(in.data, MakeSplit(f, config));
  Dataset train = parts.train;
  const CopulaModel model = Fit(train, config.Synthesizer(), in.metadata);
  std::filesystem::create_directories(dir);
  WriteTextFile(dir / kModelFile, ModelToJson(model));
  out << "wrote " << (dir / kModelFile).string() << "\n";
  return kExitOk;
}

int CmdSample(const Flags& f, std::ostream& out) {
  if (f.model.empty()) throw Error(ErrorCode::kInvalidArgument, "--model is required");
  const auto dir = RequireOut(f);
  const CopulaModel model = ModelFromJson(ReadTextFile(f.model));
  RunConfig config;
  config.seed = EffectiveSeed(f.seed);
  if (f.sample_rows == 0) throw Error(ErrorCode::kInvalidArgument, "sample_rows must be positive");
  const Dataset synthetic = Sample(model, f.sample_rows, SampleSeed(config));
  std::filesystem::create_directories(dir);
  WriteCsv(synthetic, dir / kSyntheticFile);
  out << "wrote " << (dir / kSyntheticFile).string() << "\n";
  return kExitOk;
}

int CmdEvaluate(const Flags& f, std::ostream& out) {
  if (f.synthetic.empty()) throw Error(ErrorCode::kInvalidArgument, "--synthetic is required");
  const auto dir = RequireOut(f);
  const auto externals = Externals(f);
  const RunConfig config = MakeConfig(f, externals, f.backend);
  const Inputs in = LoadInputs(f);
  const SplitSpec split = MakeSplit(f, config);
  const Split parts = SplitHoldout(in.data, split);
  LoadOptions load;
  load.expected_schema = in.data.schema();
  load.require_binary_label = false;
  Dataset synthetic = DatasetFromRaw(ReadCsvFile(f.synthetic), in.metadata, load);
  PipelineResult result =
      Evaluate(std::move(synthetic), parts.holdout, in.metadata, MakeOptions(f), config.seed);
  WriteReports(result.quality, result.fairness, result.score, result.synthetic,
               RunSummary("evaluate", in, config, split, result.score), dir);
  PrintScore(out, result.score);
  return kExitOk;
}

int CmdScore(const Flags& f, std::ostream& out) {
  if (f.quality.empty() || f.fairness.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--quality and --fairness are required");
  }
  const double quality = ReadOverallScore(f.quality);
  const FprRatio ratio = ReadMaxRelFpr(f.fairness);
  bool degenerate = false;
  {
    const auto doc = nlohmann::json::parse(ReadTextFile(f.fairness), nullptr, false);
    if (doc.is_object() && doc.contains("tstr") && doc["tstr"].contains("degenerate") &&
        doc["tstr"]["degenerate"].is_boolean()) {
      degenerate = doc["tstr"]["degenerate"].get<bool>();
    }
  }
  PrintScore(out, SynthScore(quality, ratio, f.parity_threshold, degenerate));
  return kExitOk;
}

int CmdRun(const Flags& f, std::ostream& out) {
  const auto externals = Externals(f);
  const RunConfig config = MakeConfig(f, externals, f.backend);
  const auto dir = RequireOut(f);
  const Inputs in = LoadInputs(f);
  const SplitSpec split = MakeSplit(f, config);
  const PipelineResult result = RunPipeline(config, in.data, in.metadata, split, MakeOptions(f));
  WriteReports(result.quality, result.fairness, result.score, result.synthetic,
               RunSummary("run", in, config, split, result.score), dir);
  PrintScore(out, result.score);
  return kExitOk;
}

int CmdSupervise(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto externals = Externals(f);
  const RunConfig config = MakeConfig(f, externals, f.backend);
  const auto dir = RequireOut(f);
  Targets targets;
  targets.min_synth_score = f.min_score;
  targets.parity_threshold = f.parity_threshold;
  targets.max_refinements = f.max_refinements;
  targets.Validate();
  const Inputs in = LoadInputs(f);
  const SplitSpec split = MakeSplit(f, config);
  const SupervisorSummary summary =
      Supervise(config, in.data, in.metadata, split, targets, MakeOptions(f));

  nlohmann::ordered_json doc;
  doc["command"] = "supervise";
  doc["data"] = in.demo ? "demo" : "csv";
  doc["targets"] = {{"min_synth_score", targets.min_synth_score},
                    {"parity_threshold", targets.parity_threshold},
                    {"max_refinements", targets.max_refinements}};
  doc["split"] = {{"holdout_fraction", split.holdout_fraction}, {"seed", split.seed}};
  const nlohmann::ordered_json loop = SupervisorSummaryToJson(summary);
  for (auto it = loop.begin(); it != loop.end(); ++it) doc[it.key()] = it.value();

  if (!summary.best) {
    std::filesystem::create_directories(dir);
    WriteTextFile(dir / kSummaryFile, DumpFixed(doc));
    err << "error: every iteration failed";
    if (!summary.history.empty() && summary.history.back().error) {
      err << " (last: " << *summary.history.back().error << ")";
    }
    err << "\n";
    return kExitRuntime;
  }
  const PipelineResult& best = *summary.best;
  WriteReports(best.quality, best.fairness, best.score, best.synthetic, doc, dir);
  out << "stop_reason " << ToString(summary.stop_reason) << "\n";
  out << "iterations " << summary.history.size() << "\n";
  out << "best_iteration " << *summary.best_iteration << "\n";
  PrintScore(out, best.score);
  return kExitOk;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int CmdBench(const Flags& f, std::ostream& out) {
  const auto externals = Externals(f);
  std::vector<std::string> names = SplitList(f.backends);
  if (names.empty()) names = ValidBackendNames(externals);
  std::vector<RunConfig> configs;
  for (const auto& name : names) configs.push_back(MakeConfig(f, externals, name));
  const Inputs in = LoadInputs(f);
  const SplitSpec split = MakeSplit(f, configs.front());
  const auto rows = BatchEvaluate(configs, in.data, in.metadata, split, MakeOptions(f));
  const std::string table = FormatBenchTable(rows);
  out << table;
  if (!f.out.empty()) {
    const std::filesystem::path dir = f.out;
    std::filesystem::create_directories(dir);
    WriteTextFile(dir / kBenchTableFile, table);
    WriteTextFile(dir / kBenchJsonFile, DumpFixed(BenchToJson(rows, configs.front(), split)));
  }
  return kExitOk;
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Fairness-aware synthetic tabular data: generate, evaluate, refine"};
  app.name("fairsynth");
  app.require_subcommand(1);

  auto* demo = app.add_subcommand("demo", "Write the built-in demo table and its metadata");
  demo->add_option("--rows", f.demo_rows, "Rows")->capture_default_str();
  demo->add_option("--disparity", f.disparity, "Planted positive-rate gap")
      ->capture_default_str();
  demo->add_option("--seed", f.seed, "Seed")->capture_default_str();
  demo->add_option("--out", f.out, "Output directory")->required();

  auto* fit = app.add_subcommand("fit", "Fit a native synthesizer and save it");
  AddShared(fit, f);
  auto* sample = app.add_subcommand("sample", "Sample rows from a saved model");
  AddShared(sample, f);
  sample->add_option("--model", f.model, "Model JSON written by fit")->required();
  auto* evaluate = app.add_subcommand("evaluate", "Score an existing synthetic CSV");
  AddShared(evaluate, f);
  evaluate->add_option("--synthetic", f.synthetic, "Synthetic CSV")->required();
  auto* score = app.add_subcommand("score", "Recompute synth_score from report files");
  score->add_option("--quality", f.quality, "Quality report JSON")->required();
  score->add_option("--fairness", f.fairness, "Fairness report JSON")->required();
  score->add_option("--parity-threshold", f.parity_threshold, "Max relative FPR target")
      ->capture_default_str();
  auto* run = app.add_subcommand("run", "Run one generate/evaluate pipeline");
  AddShared(run, f);
  auto* supervise = app.add_subcommand("supervise", "Run the refinement loop");
  AddShared(supervise, f);
  auto* bench = app.add_subcommand("bench", "Evaluate several backends on one split");
  AddShared(bench, f);
  bench->add_option("--backends", f.backends, "Comma-separated backend names (default: all)");

  std::vector<const char*> argv{"fairsynth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*demo) return CmdDemo(f, out);
    if (*fit) return CmdFit(f, out);
    if (*sample) return CmdSample(f, out);
    if (*evaluate) return CmdEvaluate(f, out);
    if (*score) return CmdScore(f, out);
    if (*run) return CmdRun(f, out);
    if (*supervise) return CmdSupervise(f, out, err);
    if (*bench) return CmdBench(f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return IsValidationError(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace fairsynth
