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

#ifndef FAIRSYNTH_REPORTS_HPP_
#define FAIRSYNTH_REPORTS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairsynth/composite.hpp"
#include "fairsynth/quality.hpp"
#include "fairsynth/supervisor.hpp"
#include "fairsynth/tstr.hpp"
#include "json.hpp"

namespace fairsynth {

inline constexpr const char* kQualityFile = "sdmetrics_quality_report.json";
inline constexpr const char* kFairnessFile = "fairness_metrics.json";
inline constexpr const char* kSummaryFile = "run_summary.json";
inline constexpr const char* kSyntheticFile = "synthetic_data.csv";

// Serializes with two-space indentation, keys in insertion order and every
// floating-point number printed with exactly six decimals.
std::string DumpFixed(const nlohmann::ordered_json& doc);

// Number, "inf" or "undefined".
nlohmann::ordered_json RatioToJson(const FprRatio& ratio);
FprRatio RatioFromJson(const nlohmann::json& value);

nlohmann::ordered_json QualityToJson(const QualityReport& report);
nlohmann::ordered_json FairnessToJson(const FairnessReport& report,
                                      const CompositeScore& score);
nlohmann::ordered_json ConfigToJson(const RunConfig& config);
nlohmann::ordered_json ScoreToJson(const CompositeScore& score);
nlohmann::ordered_json SupervisorSummaryToJson(const SupervisorSummary& summary);

struct ReportBundle {
  std::filesystem::path out_dir;
  std::filesystem::path quality_json;
  std::filesystem::path fairness_json;
  std::filesystem::path summary_json;
  std::filesystem::path synthetic_csv;
};

ReportBundle WriteReports(const QualityReport& quality, const FairnessReport& fairness,
                          const CompositeScore& score, const Dataset& synthetic,
                          const nlohmann::ordered_json& summary,
                          const std::filesystem::path& out_dir);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

// Inputs of `score`: the quality file's overall_score and the fairness
// file's max_rel_fpr.
double ReadOverallScore(const std::filesystem::path& quality_json);
FprRatio ReadMaxRelFpr(const std::filesystem::path& fairness_json);

// Planted-bias stand-in for a clinical table: Race, Sex, Setting, two
// symptom scales and a binary Diagnosis whose positive rate in the
// overdiagnosed Race group exceeds the base rate by disparity_strength.
struct DemoSpec {
  std::size_t n_rows = 2000;
  std::uint64_t seed = 0;
  double disparity_strength = 0.3;
};

inline constexpr const char* kDemoOverdiagnosedGroup = "Black";
inline constexpr double kDemoBaseRate = 0.35;

Dataset MakeDemoDataset(const DemoSpec& spec);
Metadata DemoMetadata();

struct BenchRow {
  std::string backend;
  std::optional<CompositeScore> score;
  std::optional<std::string> error;
};

// One pipeline per backend (no refinement) over a shared split and seed.
// Backends run on worker threads; failures are recorded in their row.
std::vector<BenchRow> BatchEvaluate(const std::vector<RunConfig>& backends,
                                    const Dataset& real, const Metadata& metadata,
                                    const SplitSpec& split,
                                    const EvaluationOptions& options);

std::string FormatBenchTable(const std::vector<BenchRow>& rows);
nlohmann::ordered_json BenchToJson(const std::vector<BenchRow>& rows,
                                   const RunConfig& config, const SplitSpec& split);

}  // namespace fairsynth

#endif  // FAIRSYNTH_REPORTS_HPP_
