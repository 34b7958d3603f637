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

// Generate / evaluate / refine loop.
//
// The generator stage sees only the training slice, the RunConfig and the
// metadata. Evaluator output reaches it exclusively through a
// RefinementAction applied to the RunConfig, so iteration k's synthetic
// sample is a function of (real data, RunConfig_k) alone.

#ifndef FAIRSYNTH_SUPERVISOR_HPP_
#define FAIRSYNTH_SUPERVISOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fairsynth/composite.hpp"
#include "fairsynth/copula.hpp"
#include "fairsynth/quality.hpp"
#include "fairsynth/schema.hpp"
#include "fairsynth/tstr.hpp"

namespace fairsynth {

struct RunConfig {
  BackendKind backend = BackendKind::kGaussianCopula;
  std::optional<ExternalBackend> external;
  std::size_t train_rows = 1000;
  std::size_t sample_rows = 500;
  int epochs = 20;
  std::uint64_t seed = 0;
  double correlation_shrinkage = 0.0;
  bool balance_groups = false;
  // Attribute to balance; empty means the first protected attribute.
  std::string balance_attribute;

  void Validate() const;
  SynthesizerConfig Synthesizer() const;
  std::string BackendName() const;
  bool operator==(const RunConfig& other) const;
};

struct Targets {
  double min_synth_score = 0.7;
  double parity_threshold = kDefaultParityThreshold;
  int max_refinements = 3;

  void Validate() const;
};

struct RefinementAction {
  enum class Kind { kBalanceGroups, kShrinkCorrelation, kResample, kIncreaseEpochs };
  Kind kind = Kind::kResample;
  std::uint64_t new_seed = 0;  // kResample
  std::string attribute;       // kBalanceGroups

  RunConfig Apply(const RunConfig& config) const;
  std::string ToString() const;
  bool operator==(const RefinementAction&) const = default;
};

enum class StopReason { kTargetMet, kBudget, kAllFailed };
std::string ToString(StopReason reason);

using Plan = std::variant<RefinementAction, StopReason>;

struct EvaluationOptions {
  LogisticHyperparams logistic;
  std::size_t min_support = kDefaultMinSupport;
  double parity_threshold = kDefaultParityThreshold;
};

// Synthesis stage. Implementations must not depend on anything except
// their arguments.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual Dataset Generate(const Dataset& train, const RunConfig& config,
                           const Metadata& metadata) const = 0;
};

// Copula / independent backends in-process, external ones via the adapter
// (train CSV and metadata JSON staged in a scratch directory).
class NativeGenerator final : public Generator {
 public:
  Dataset Generate(const Dataset& train, const RunConfig& config,
                   const Metadata& metadata) const override;
};

struct PipelineResult {
  Dataset synthetic;
  QualityReport quality;
  FairnessReport fairness;
  CompositeScore score;
};

// Evaluator stage: quality and TSTR fairness against the holdout.
PipelineResult Evaluate(Dataset synthetic, const Dataset& holdout,
                        const Metadata& metadata, const EvaluationOptions& options,
                        std::uint64_t seed);

// Seeds derived from RunConfig::seed for the individual stages.
std::uint64_t FitSeed(const RunConfig& config);
std::uint64_t SampleSeed(const RunConfig& config);
std::uint64_t BalanceSeed(const RunConfig& config);

// The split uses config.train_rows with split.holdout_fraction / split.seed.
PipelineResult RunPipeline(const RunConfig& config, const Dataset& real,
                           const Metadata& metadata, const SplitSpec& split,
                           const EvaluationOptions& options,
                           const Generator& generator = NativeGenerator());

// Oversamples (with replacement) every (group x label) cell of `attribute`
// up to the largest cell. Inputs with fewer than two groups are returned
// unchanged. Extra rows are appended after the originals.
Dataset BalanceGroups(const Dataset& train, const Metadata& metadata,
                      const std::string& attribute, std::uint64_t seed);

// Attribute with the largest defined max_rel_fpr (first on ties), or the
// first protected attribute when nothing is defined.
std::string MostDisparateAttribute(const FairnessReport& report,
                                   const Metadata& metadata);

struct IterationRecord {
  RunConfig config;
  std::optional<CompositeScore> score;
  std::optional<std::string> error;
  std::optional<RefinementAction> action_taken;  // issued after this iteration
};

struct SupervisorState {
  int iteration = -1;
  std::vector<IterationRecord> history;
  std::optional<std::size_t> best;
};

// Fixed policy: stop on target or budget, otherwise for parity failures the
// first untried of [BalanceGroups, ShrinkCorrelation, Resample] (Resample
// once all were tried), for quality shortfalls IncreaseEpochs on external
// backends and Resample otherwise. Failed iterations are resampled.
Plan PlanRefinement(const SupervisorState& state, const CompositeScore* score,
                    const Targets& targets, const RunConfig& config,
                    const FairnessReport* latest);

struct SupervisorSummary {
  StopReason stop_reason = StopReason::kAllFailed;
  std::optional<std::size_t> best_iteration;
  std::vector<IterationRecord> history;
  std::optional<PipelineResult> best;
};

// One generate/evaluate iteration for a given config; throws on failure.
using IterationRunner = std::function<PipelineResult(const RunConfig&)>;

// The refinement loop over an arbitrary iteration runner. `metadata` only
// resolves the default BalanceGroups attribute.
SupervisorSummary SuperviseLoop(const RunConfig& initial, const Metadata& metadata,
                                const Targets& targets, const IterationRunner& run);

// Runs at most targets.max_refinements + 1 pipelines and returns the best
// iteration by synth_score (earliest on ties).
SupervisorSummary Supervise(const RunConfig& initial, const Dataset& real,
                            const Metadata& metadata, const SplitSpec& split,
                            const Targets& targets,
                            const EvaluationOptions& options = {},
                            const Generator& generator = NativeGenerator());

}  // namespace fairsynth

#endif  // FAIRSYNTH_SUPERVISOR_HPP_
