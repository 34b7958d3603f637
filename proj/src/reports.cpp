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

#include "fairsynth/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairsynth/error.hpp"
#include "fairsynth/rng.hpp"

namespace fairsynth {

namespace {

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void Dump(const nlohmann::ordered_json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + nlohmann::ordered_json(it.key()).dump() + ": ";
        Dump(it.value(), indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        Dump(v, indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float:
      out += Fixed6(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string DumpFixed(const nlohmann::ordered_json& doc) {
  std::string out;
  Dump(doc, 0, out);
  out += "\n";
  return out;
}

nlohmann::ordered_json RatioToJson(const FprRatio& ratio) {
  switch (ratio.kind) {
    case FprRatio::Kind::kFinite: return ratio.value;
    case FprRatio::Kind::kInfinite: return "inf";
    case FprRatio::Kind::kUndefined: return "undefined";
  }
  return "undefined";
}

FprRatio RatioFromJson(const nlohmann::json& value) {
  if (value.is_number()) return FprRatio::Finite(value.get<double>());
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return FprRatio::Infinite();
    if (s == "undefined") return FprRatio::Undefined();
  }
  throw Error(ErrorCode::kParseError, "max_rel_fpr must be a number, \"inf\" or \"undefined\"");
}

nlohmann::ordered_json QualityToJson(const QualityReport& report) {
  nlohmann::ordered_json doc;
  doc["overall_score"] = report.overall_score;
  nlohmann::ordered_json shapes;
  shapes["score"] = report.shapes_average;
  nlohmann::ordered_json per_column = nlohmann::ordered_json::object();
  for (const auto& s : report.shapes) {
    nlohmann::ordered_json entry;
    entry["metric"] = s.metric;
    entry["score"] = s.score;
    per_column[s.column] = std::move(entry);
  }
  shapes["per_column"] = std::move(per_column);
  doc["column_shapes"] = std::move(shapes);
  nlohmann::ordered_json trends;
  trends["score"] = report.trends_average;
  nlohmann::ordered_json per_pair = nlohmann::ordered_json::array();
  for (const auto& t : report.pair_trends) {
    nlohmann::ordered_json entry;
    entry["a"] = t.column_a;
    entry["b"] = t.column_b;
    entry["metric"] = t.metric;
    entry["score"] = t.score;
    per_pair.push_back(std::move(entry));
  }
  trends["per_pair"] = std::move(per_pair);
  doc["column_pair_trends"] = std::move(trends);
  return doc;
}

nlohmann::ordered_json FairnessToJson(const FairnessReport& report,
                                      const CompositeScore& score) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json tstr;
  tstr["model"] = "logistic_regression";
  tstr["threshold"] = report.threshold;
  tstr["degenerate"] = report.degenerate;
  doc["tstr"] = std::move(tstr);
  nlohmann::ordered_json by_attribute = nlohmann::ordered_json::object();
  for (const auto& af : report.by_attribute) {
    nlohmann::ordered_json attr;
    nlohmann::ordered_json fpr = nlohmann::ordered_json::object();
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [group, rate] : af.groups) {
      if (rate.fpr) {
        fpr[group] = *rate.fpr;
      } else {
        fpr[group] = "undefined";
      }
      counts[group] = {{"negatives", rate.negatives},
                       {"false_positives", rate.false_positives}};
    }
    attr["fpr"] = std::move(fpr);
    attr["max_rel_fpr"] = RatioToJson(af.max_rel_fpr);
    attr["counts"] = std::move(counts);
    by_attribute[af.attribute] = std::move(attr);
  }
  doc["by_attribute"] = std::move(by_attribute);
  doc["max_rel_fpr"] = RatioToJson(score.max_rel_fpr);
  doc["fairness_mult"] = score.fairness_mult;
  doc["quality"] = score.quality;
  doc["synth_score"] = score.synth_score;
  doc["parity_threshold"] = score.parity_threshold;
  doc["parity_ok"] = score.parity_ok;
  nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
  for (const auto& e : report.excluded_groups) {
    excluded.push_back({{"attribute", e.attribute}, {"group", e.group}, {"reason", e.reason}});
  }
  doc["excluded_groups"] = std::move(excluded);
  doc["warnings"] = report.warnings;
  return doc;
}

nlohmann::ordered_json ConfigToJson(const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["backend"] = config.BackendName();
  doc["train_rows"] = config.train_rows;
  doc["sample_rows"] = config.sample_rows;
  doc["epochs"] = config.epochs;
  doc["seed"] = config.seed;
  doc["correlation_shrinkage"] = config.correlation_shrinkage;
  doc["balance_groups"] = config.balance_groups;
  if (config.balance_groups) doc["balance_attribute"] = config.balance_attribute;
  return doc;
}

nlohmann::ordered_json ScoreToJson(const CompositeScore& score) {
  nlohmann::ordered_json doc;
  doc["quality"] = score.quality;
  doc["max_rel_fpr"] = RatioToJson(score.max_rel_fpr);
  doc["fairness_mult"] = score.fairness_mult;
  doc["synth_score"] = score.synth_score;
  doc["parity_threshold"] = score.parity_threshold;
  doc["parity_ok"] = score.parity_ok;
  doc["degenerate"] = score.degenerate;
  return doc;
}

nlohmann::ordered_json SupervisorSummaryToJson(const SupervisorSummary& summary) {
  nlohmann::ordered_json doc;
  doc["stop_reason"] = ToString(summary.stop_reason);
  if (summary.best_iteration) {
    doc["best_iteration"] = *summary.best_iteration;
  } else {
    doc["best_iteration"] = nullptr;
  }
  nlohmann::ordered_json history = nlohmann::ordered_json::array();
  for (const auto& rec : summary.history) {
    nlohmann::ordered_json entry;
    entry["config"] = ConfigToJson(rec.config);
    entry["scores"] = rec.score ? ScoreToJson(*rec.score) : nlohmann::ordered_json(nullptr);
    entry["action_taken"] = rec.action_taken ? nlohmann::ordered_json(rec.action_taken->ToString())
                                             : nlohmann::ordered_json(nullptr);
    if (rec.error) entry["error"] = *rec.error;
    history.push_back(std::move(entry));
  }
  doc["history"] = std::move(history);
  return doc;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ReportBundle WriteReports(const QualityReport& quality, const FairnessReport& fairness,
                          const CompositeScore& score, const Dataset& synthetic,
                          const nlohmann::ordered_json& summary,
                          const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + out_dir.string());
  ReportBundle bundle;
  bundle.out_dir = out_dir;
  bundle.quality_json = out_dir / kQualityFile;
  bundle.fairness_json = out_dir / kFairnessFile;
  bundle.summary_json = out_dir / kSummaryFile;
  bundle.synthetic_csv = out_dir / kSyntheticFile;
  WriteTextFile(bundle.quality_json, DumpFixed(QualityToJson(quality)));
  WriteTextFile(bundle.fairness_json, DumpFixed(FairnessToJson(fairness, score)));
  WriteTextFile(bundle.summary_json, DumpFixed(summary));
  WriteCsv(synthetic, bundle.synthetic_csv);
  return bundle;
}

namespace {

nlohmann::json ParseFile(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

double ReadOverallScore(const std::filesystem::path& quality_json) {
  const auto doc = ParseFile(quality_json);
  if (!doc.contains("overall_score") || !doc["overall_score"].is_number()) {
    throw Error(ErrorCode::kParseError, quality_json.string() + ": missing overall_score");
  }
  return doc["overall_score"].get<double>();
}

FprRatio ReadMaxRelFpr(const std::filesystem::path& fairness_json) {
  const auto doc = ParseFile(fairness_json);
  if (!doc.contains("max_rel_fpr")) {
    throw Error(ErrorCode::kParseError, fairness_json.string() + ": missing max_rel_fpr");
  }
  return RatioFromJson(doc["max_rel_fpr"]);
}

// ---------------------------------------------------------------------------
// Demo data

namespace {

std::size_t Draw(Rng& rng, std::initializer_list<double> probs) {
  const double u = rng.Uniform();
  double acc = 0.0;
  std::size_t i = 0;
  for (double p : probs) {
    acc += p;
    if (u < acc) return i;
    ++i;
  }
  return probs.size() - 1;
}

double Round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace

Metadata DemoMetadata() {
  Metadata md;
  md.label_column = "Diagnosis";
  md.positive_label = "Schizophrenia";
  md.protected_attributes = {"Race", "Sex"};
  return md;
}

Dataset MakeDemoDataset(const DemoSpec& spec) {
  if (spec.n_rows < 50) {
    throw Error(ErrorCode::kInvalidArgument, "demo dataset needs at least 50 rows");
  }
  if (!(spec.disparity_strength >= 0.0 && spec.disparity_strength <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "disparity_strength must lie in [0,1]");
  }
  const std::vector<std::string> races{"White", "Black", "Hispanic", "Asian"};
  const std::vector<std::string> sexes{"Male", "Female"};
  const std::vector<std::string> settings{"Outpatient", "Inpatient", "Emergency"};
  const std::vector<std::string> diagnoses{"Affective", "Schizophrenia"};

  TableSchema schema;
  schema.columns = {{"Race", ColumnKind::kCategorical},
                    {"Sex", ColumnKind::kCategorical},
                    {"Setting", ColumnKind::kCategorical},
                    {"PositiveSymptoms", ColumnKind::kNumeric},
                    {"NegativeSymptoms", ColumnKind::kNumeric},
                    {"Diagnosis", ColumnKind::kCategorical}};
  std::vector<Column> cols(6);
  cols[0].categories = races;
  cols[1].categories = sexes;
  cols[2].categories = settings;
  cols[5].categories = diagnoses;
  cols[3].kind = cols[4].kind = ColumnKind::kNumeric;

  Rng rng(spec.seed);
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    const std::size_t race = Draw(rng, {0.50, 0.20, 0.18, 0.12});
    const std::size_t sex = Draw(rng, {0.55, 0.45});
    const std::size_t setting = Draw(rng, {0.45, 0.40, 0.15});
    double p = kDemoBaseRate;
    if (races[race] == kDemoOverdiagnosedGroup) p += spec.disparity_strength;
    p = std::min(p, 0.99);
    const int y = rng.Bernoulli(p) ? 1 : 0;
    const double positive = 14.0 + 6.0 * y + (races[race] == "Hispanic" ? 1.5 : 0.0) +
                            (settings[setting] == "Inpatient" ? 2.0 : 0.0) + 4.0 * rng.Normal();
    const double negative =
        18.0 + 3.0 * y - (sexes[sex] == "Female" ? 1.0 : 0.0) + 5.0 * rng.Normal();
    cols[0].codes.push_back(static_cast<std::int32_t>(race));
    cols[1].codes.push_back(static_cast<std::int32_t>(sex));
    cols[2].codes.push_back(static_cast<std::int32_t>(setting));
    cols[3].values.push_back(Round2(positive));
    cols[4].values.push_back(Round2(negative));
    cols[5].codes.push_back(y);
  }
  return Dataset(std::move(schema), std::move(cols));
}

// ---------------------------------------------------------------------------
// Batch evaluation

std::vector<BenchRow> BatchEvaluate(const std::vector<RunConfig>& backends,
                                    const Dataset& real, const Metadata& metadata,
                                    const SplitSpec& split,
                                    const EvaluationOptions& options) {
  if (backends.empty()) throw Error(ErrorCode::kInvalidArgument, "no backends to evaluate");
  std::vector<BenchRow> rows(backends.size());
  const long n = static_cast<long>(backends.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    BenchRow& row = rows[k];
    row.backend = backends[k].BackendName();
    try {
      row.score = RunPipeline(backends[k], real, metadata, split, options).score;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

std::string FormatBenchTable(const std::vector<BenchRow>& rows) {
  std::size_t width = std::string("Backend").size();
  for (const auto& r : rows) width = std::max(width, r.backend.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  auto cell = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << pad("Backend", width) << "  " << pad("SDMetrics quality", 17) << "  "
      << pad("max rel. FPR", 12) << "  " << pad("synth_score", 11) << "  degenerate\n";
  for (const auto& r : rows) {
    out << pad(r.backend, width) << "  ";
    if (!r.score) {
      out << pad("ERROR", 17) << "  " << pad("ERROR", 12) << "  " << pad("ERROR", 11)
          << "  ERROR  (" << r.error.value_or("unknown failure") << ")\n";
      continue;
    }
    const CompositeScore& s = *r.score;
    std::string ratio = s.max_rel_fpr.kind == FprRatio::Kind::kFinite ? cell(s.max_rel_fpr.value)
                        : s.max_rel_fpr.kind == FprRatio::Kind::kInfinite ? "inf"
                                                                          : "undefined";
    out << pad(cell(s.quality), 17) << "  " << pad(ratio, 12) << "  "
        << pad(cell(s.synth_score), 11) << "  " << (s.degenerate ? "yes" : "no") << "\n";
  }
  return out.str();
}

nlohmann::ordered_json BenchToJson(const std::vector<BenchRow>& rows,
                                   const RunConfig& config, const SplitSpec& split) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json cfg = ConfigToJson(config);
  cfg.erase("backend");
  cfg["holdout_fraction"] = split.holdout_fraction;
  cfg["split_seed"] = split.seed;
  doc["config"] = std::move(cfg);
  nlohmann::ordered_json out_rows = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json entry;
    entry["backend"] = r.backend;
    if (r.score) {
      entry["quality"] = r.score->quality;
      entry["max_rel_fpr"] = RatioToJson(r.score->max_rel_fpr);
      entry["fairness_mult"] = r.score->fairness_mult;
      entry["synth_score"] = r.score->synth_score;
      entry["degenerate"] = r.score->degenerate;
    } else {
      entry["error"] = r.error.value_or("unknown failure");
    }
    out_rows.push_back(std::move(entry));
  }
  doc["rows"] = std::move(out_rows);
  return doc;
}

}  // namespace fairsynth
