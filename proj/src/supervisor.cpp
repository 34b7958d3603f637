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

#include "fairsynth/supervisor.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>

#include "fairsynth/error.hpp"
#include "fairsynth/external.hpp"
#include "fairsynth/rng.hpp"

namespace fairsynth {

void RunConfig::Validate() const {
  if (train_rows == 0) throw Error(ErrorCode::kInvalidArgument, "train_rows must be positive");
  if (sample_rows == 0) throw Error(ErrorCode::kInvalidArgument, "sample_rows must be positive");
  Synthesizer().Validate();
}

SynthesizerConfig RunConfig::Synthesizer() const {
  SynthesizerConfig s;
  s.backend = backend;
  s.external = external;
  s.epochs = epochs;
  s.seed = FitSeed(*this);
  s.correlation_shrinkage = correlation_shrinkage;
  return s;
}

std::string RunConfig::BackendName() const {
  return fairsynth::BackendName(Synthesizer());
}

bool RunConfig::operator==(const RunConfig& o) const {
  const bool same_external =
      external.has_value() == o.external.has_value() &&
      (!external || (external->name == o.external->name &&
                     external->command == o.external->command &&
                     external->timeout_seconds == o.external->timeout_seconds));
  return backend == o.backend && same_external && train_rows == o.train_rows &&
         sample_rows == o.sample_rows && epochs == o.epochs && seed == o.seed &&
         correlation_shrinkage == o.correlation_shrinkage &&
         balance_groups == o.balance_groups && balance_attribute == o.balance_attribute;
}

void Targets::Validate() const {
  if (!(min_synth_score > 0.0 && min_synth_score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_synth_score must lie in (0,1]");
  }
  if (!(parity_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "parity_threshold must be positive");
  }
  if (max_refinements < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_refinements must be >= 0");
  }
}

RunConfig RefinementAction::Apply(const RunConfig& config) const {
  RunConfig next = config;
  switch (kind) {
    case Kind::kBalanceGroups:
      next.balance_groups = true;
      next.balance_attribute = attribute;
      break;
    case Kind::kShrinkCorrelation:
      next.correlation_shrinkage = std::min(1.0, config.correlation_shrinkage + 0.25);
      break;
    case Kind::kResample:
      next.seed = new_seed;
      break;
    case Kind::kIncreaseEpochs:
      next.epochs = config.epochs * 2;
      break;
  }
  return next;
}

std::string RefinementAction::ToString() const {
  switch (kind) {
    case Kind::kBalanceGroups:
      return attribute.empty() ? "balance_groups" : "balance_groups(" + attribute + ")";
    case Kind::kShrinkCorrelation:
      return "shrink_correlation";
    case Kind::kResample:
      return "resample(seed=" + std::to_string(new_seed) + ")";
    case Kind::kIncreaseEpochs:
      return "increase_epochs";
  }
  return "unknown";
}

std::string ToString(StopReason reason) {
  switch (reason) {
    case StopReason::kTargetMet: return "target_met";
    case StopReason::kBudget: return "budget";
    case StopReason::kAllFailed: return "all_failed";
  }
  return "unknown";
}

std::uint64_t FitSeed(const RunConfig& config) { return config.seed; }
std::uint64_t SampleSeed(const RunConfig& config) { return MixSeed(config.seed, 1); }
std::uint64_t BalanceSeed(const RunConfig& config) { return MixSeed(config.seed, 2); }

namespace {

std::filesystem::path ScratchDir(const RunConfig& config) {
  static std::atomic<unsigned> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("fairsynth-" + std::to_string(getpid()) + "-" +
                    std::to_string(counter++) + "-" + std::to_string(config.seed));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

Dataset NativeGenerator::Generate(const Dataset& train, const RunConfig& config,
                                  const Metadata& metadata) const {
  if (config.backend != BackendKind::kExternal) {
    const CopulaModel model = Fit(train, config.Synthesizer(), metadata);
    return Sample(model, config.sample_rows, SampleSeed(config));
  }
  const auto dir = ScratchDir(config);
  struct Cleanup {
    std::filesystem::path path;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove_all(path, ec);
    }
  } cleanup{dir};
  ExternalInvocation inv;
  inv.train_csv = dir / "train.csv";
  inv.metadata_json = dir / "metadata.json";
  inv.out_csv = dir / "synthetic.csv";
  inv.rows = config.sample_rows;
  inv.epochs = config.epochs;
  inv.seed = config.seed;
  WriteCsv(train, inv.train_csv);
  {
    std::ofstream md(inv.metadata_json, std::ios::binary);
    md << MetadataToJson(metadata);
  }
  return RunExternalBackend(*config.external, inv, metadata, train.schema());
}

PipelineResult Evaluate(Dataset synthetic, const Dataset& holdout,
                        const Metadata& metadata, const EvaluationOptions& options,
                        std::uint64_t seed) {
  PipelineResult result;
  result.quality = ComputeQualityReport(holdout, synthetic);
  result.fairness = ComputeFairnessReport(synthetic, holdout, metadata, options.logistic,
                                          seed, options.min_support);
  result.score = SynthScore(result.quality.overall_score, result.fairness.max_rel_fpr,
                            options.parity_threshold, result.fairness.degenerate);
  result.synthetic = std::move(synthetic);
  return result;
}

PipelineResult RunPipeline(const RunConfig& config, const Dataset& real,
                           const Metadata& metadata, const SplitSpec& split,
                           const EvaluationOptions& options, const Generator& generator) {
  config.Validate();
  SplitSpec spec = split;
  spec.train_rows = config.train_rows;
  const Split parts = SplitHoldout(real, spec);

  // Generator stage: training slice + config only.
  Dataset train = parts.train;
  if (config.balance_groups) {
    train = BalanceGroups(train, metadata, config.balance_attribute, BalanceSeed(config));
  }
  Dataset synthetic = generator.Generate(train, config, metadata);

  // Evaluator stage.
  return Evaluate(std::move(synthetic), parts.holdout, metadata, options, config.seed);
}

Dataset BalanceGroups(const Dataset& train, const Metadata& metadata,
                      const std::string& attribute, std::uint64_t seed) {
  if (metadata.protected_attributes.empty() || train.row_count() == 0) return train;
  const std::string& attr =
      attribute.empty() ? metadata.protected_attributes.front() : attribute;
  const Column& group = train.column(attr);
  const Column& label = train.column(metadata.label_column);

  std::map<std::pair<std::int32_t, std::int32_t>, std::vector<std::size_t>> cells;
  std::map<std::int32_t, std::size_t> group_sizes;
  for (std::size_t r = 0; r < train.row_count(); ++r) {
    cells[{group.codes[r], label.codes[r]}].push_back(r);
    ++group_sizes[group.codes[r]];
  }
  if (group_sizes.size() < 2) return train;

  std::size_t target = 0;
  for (const auto& [key, rows] : cells) target = std::max(target, rows.size());

  std::vector<std::size_t> order(train.row_count());
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  Rng rng(seed);
  for (const auto& [key, rows] : cells) {
    for (std::size_t k = rows.size(); k < target; ++k) {
      order.push_back(rows[rng.Below(rows.size())]);
    }
  }
  return train.SelectRows(order);
}

std::string MostDisparateAttribute(const FairnessReport& report, const Metadata& metadata) {
  const AttributeFairness* best = nullptr;
  for (const auto& af : report.by_attribute) {
    const FprRatio& r = af.max_rel_fpr;
    if (!r.defined()) continue;
    if (best == nullptr) {
      best = &af;
      continue;
    }
    const FprRatio& b = best->max_rel_fpr;
    if (b.kind == FprRatio::Kind::kInfinite) continue;
    if (r.kind == FprRatio::Kind::kInfinite || r.value > b.value) best = &af;
  }
  if (best) return best->attribute;
  return metadata.protected_attributes.empty() ? std::string()
                                               : metadata.protected_attributes.front();
}

Plan PlanRefinement(const SupervisorState& state, const CompositeScore* score,
                    const Targets& targets, const RunConfig& config,
                    const FairnessReport* latest) {
  using Kind = RefinementAction::Kind;
  if (score && score->synth_score >= targets.min_synth_score && score->parity_ok) {
    return StopReason::kTargetMet;
  }
  if (state.iteration >= targets.max_refinements) return StopReason::kBudget;

  const RefinementAction resample{Kind::kResample, config.seed + 1, {}};
  if (!score) return resample;

  auto tried = [&](Kind kind) {
    return std::any_of(state.history.begin(), state.history.end(), [&](const auto& rec) {
      return rec.action_taken && rec.action_taken->kind == kind;
    });
  };
  if (!score->parity_ok) {
    if (!tried(Kind::kBalanceGroups)) {
      // An empty attribute means "first protected attribute".
      std::string attr = latest ? MostDisparateAttribute(*latest, Metadata{}) : "";
      return RefinementAction{Kind::kBalanceGroups, 0, attr};
    }
    if (!tried(Kind::kShrinkCorrelation)) {
      return RefinementAction{Kind::kShrinkCorrelation, 0, {}};
    }
    return resample;
  }
  if (config.backend == BackendKind::kExternal) {
    return RefinementAction{Kind::kIncreaseEpochs, 0, {}};
  }
  return resample;
}

SupervisorSummary SuperviseLoop(const RunConfig& initial, const Metadata& metadata,
                                const Targets& targets, const IterationRunner& run) {
  targets.Validate();
  initial.Validate();
  SupervisorState state;
  SupervisorSummary summary;
  RunConfig config = initial;
  for (;;) {
    ++state.iteration;
    IterationRecord record;
    record.config = config;
    std::optional<PipelineResult> result;
    try {
      result = run(config);
      record.score = result->score;
    } catch (const std::exception& e) {
      record.error = e.what();
    }
    state.history.push_back(record);
    const std::size_t index = state.history.size() - 1;
    std::optional<FairnessReport> latest;
    if (result) latest = result->fairness;
    if (result && (!state.best ||
                   result->score.synth_score >
                       state.history[*state.best].score->synth_score)) {
      state.best = index;
      summary.best = std::move(result);
    }

    const CompositeScore* score = record.score ? &*record.score : nullptr;
    Plan plan = PlanRefinement(state, score, targets, config, latest ? &*latest : nullptr);
    if (auto* action = std::get_if<RefinementAction>(&plan)) {
      if (action->kind == RefinementAction::Kind::kBalanceGroups && action->attribute.empty()) {
        action->attribute = metadata.protected_attributes.empty()
                                ? std::string()
                                : metadata.protected_attributes.front();
      }
      state.history.back().action_taken = *action;
      config = action->Apply(config);
      continue;
    }
    summary.stop_reason = std::get<StopReason>(plan);
    break;
  }
  summary.history = std::move(state.history);
  summary.best_iteration = state.best;
  if (!state.best) summary.stop_reason = StopReason::kAllFailed;
  return summary;
}

SupervisorSummary Supervise(const RunConfig& initial, const Dataset& real,
                            const Metadata& metadata, const SplitSpec& split,
                            const Targets& targets, const EvaluationOptions& options,
                            const Generator& generator) {
  EvaluationOptions eval = options;
  eval.parity_threshold = targets.parity_threshold;
  return SuperviseLoop(initial, metadata, targets, [&](const RunConfig& config) {
    return RunPipeline(config, real, metadata, split, eval, generator);
  });
}

}  // namespace fairsynth
