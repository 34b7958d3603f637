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

#include "fairsynth/copula.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "fairsynth/error.hpp"
#include "fairsynth/normal.hpp"
#include "json.hpp"

namespace fairsynth {

std::optional<std::size_t> CategoricalMarginal::IndexOf(
    std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

NumericMarginal FitNumericMarginal(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewValues,
                "numeric marginal needs at least 2 values, got " +
                    std::to_string(values.size()));
  }
  NumericMarginal m{std::vector<double>(values.begin(), values.end())};
  std::sort(m.sorted_values.begin(), m.sorted_values.end());
  return m;
}

namespace {

CategoricalMarginal FromCounts(const std::map<std::string, std::size_t>& counts,
                               std::size_t total) {
  if (total == 0) {
    throw Error(ErrorCode::kTooFewValues, "categorical marginal needs a value");
  }
  // std::map iterates labels ascending, so a stable sort by count keeps the
  // lexicographic tie-break.
  std::vector<std::pair<std::string, std::size_t>> order(counts.begin(),
                                                         counts.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  CategoricalMarginal m;
  double cumulative = 0.0;
  std::size_t running = 0;
  for (const auto& [label, count] : order) {
    m.categories.push_back(label);
    m.frequencies.push_back(static_cast<double>(count) / static_cast<double>(total));
    m.lower.push_back(cumulative);
    running += count;
    cumulative = static_cast<double>(running) / static_cast<double>(total);
    m.upper.push_back(cumulative);
  }
  m.upper.back() = 1.0;
  return m;
}

}  // namespace

CategoricalMarginal FitCategoricalMarginal(std::span<const std::string> labels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& label : labels) ++counts[label];
  return FromCounts(counts, labels.size());
}

MarginalModel FitMarginal(const Column& column) {
  if (column.kind == ColumnKind::kNumeric) return FitNumericMarginal(column.values);
  std::vector<std::size_t> by_code(column.categories.size(), 0);
  for (std::int32_t code : column.codes) ++by_code[static_cast<std::size_t>(code)];
  std::map<std::string, std::size_t> counts;
  for (std::size_t k = 0; k < by_code.size(); ++k) {
    if (by_code[k] > 0) counts[column.categories[k]] += by_code[k];
  }
  return FromCounts(counts, column.codes.size());
}

std::vector<double> ToNormalScores(const Column& column,
                                   const MarginalModel& marginal, Rng& rng) {
  std::vector<double> scores(column.size());
  if (const auto* num = std::get_if<NumericMarginal>(&marginal)) {
    if (column.kind != ColumnKind::kNumeric) {
      throw Error(ErrorCode::kSchemaMismatch, "numeric marginal, categorical column");
    }
    const auto& sorted = num->sorted_values;
    const double denom = static_cast<double>(sorted.size()) + 1.0;
    for (std::size_t r = 0; r < column.values.size(); ++r) {
      const double v = column.values[r];
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), v);
      const auto hi = std::upper_bound(lo, sorted.end(), v);
      const double less = static_cast<double>(lo - sorted.begin());
      const double equal = static_cast<double>(hi - lo);
      const double rank = less + (equal + 1.0) / 2.0;
      scores[r] = StdNormalQuantile(rank / denom);
    }
    return scores;
  }
  const auto& cat = std::get<CategoricalMarginal>(marginal);
  if (column.kind != ColumnKind::kCategorical) {
    throw Error(ErrorCode::kSchemaMismatch, "categorical marginal, numeric column");
  }
  // Resolve each code of the column's table once.
  std::vector<std::optional<std::size_t>> slot(column.categories.size());
  for (std::size_t k = 0; k < column.categories.size(); ++k) {
    slot[k] = cat.IndexOf(column.categories[k]);
  }
  for (std::size_t r = 0; r < column.codes.size(); ++r) {
    const auto& s = slot[static_cast<std::size_t>(column.codes[r])];
    if (!s) {
      throw Error(ErrorCode::kUnknownCategory,
                  "category '" + column.Label(r) + "' not in marginal");
    }
    const double a = cat.lower[*s];
    const double b = cat.upper[*s];
    double u = a + (b - a) * rng.Uniform();
    if (u >= b) u = std::nextafter(b, a);
    scores[r] = StdNormalQuantile(u);
  }
  return scores;
}

double InverseNumeric(const NumericMarginal& marginal, double u) {
  const auto& x = marginal.sorted_values;
  const std::size_t n = x.size();
  const double t = u * (static_cast<double>(n) + 1.0);
  if (t <= 1.0) return x.front();
  if (t >= static_cast<double>(n)) return x.back();
  const auto i = static_cast<std::size_t>(std::floor(t));
  const double frac = t - static_cast<double>(i);
  // Plotting position i/(n+1) belongs to x[i-1] (0-based).
  return x[i - 1] + frac * (x[i] - x[i - 1]);
}

std::size_t InverseCategorical(const CategoricalMarginal& marginal, double u) {
  const auto it = std::upper_bound(marginal.upper.begin(), marginal.upper.end(), u);
  if (it == marginal.upper.end()) return marginal.categories.size() - 1;
  return static_cast<std::size_t>(it - marginal.upper.begin());
}

Eigen::MatrixXd NearestPsd(const Eigen::MatrixXd& m, double eps) {
  const Eigen::Index d = m.rows();
  if (d == 0) return m;
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  Eigen::VectorXd lambda = solver.eigenvalues();
  for (Eigen::Index i = 0; i < d; ++i) lambda(i) = std::max(lambda(i), eps);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd repaired = v * lambda.asDiagonal() * v.transpose();
  Eigen::VectorXd inv_sqrt(d);
  for (Eigen::Index i = 0; i < d; ++i) inv_sqrt(i) = 1.0 / std::sqrt(repaired(i, i));
  Eigen::MatrixXd out = inv_sqrt.asDiagonal() * repaired * inv_sqrt.asDiagonal();
  for (Eigen::Index i = 0; i < d; ++i) {
    out(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double avg = std::clamp(0.5 * (out(i, j) + out(j, i)), -1.0, 1.0);
      out(i, j) = avg;
      out(j, i) = avg;
    }
  }
  return out;
}

Eigen::MatrixXd Cholesky(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double diag = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw Error(ErrorCode::kDomainError, "matrix is not positive definite");
    }
    l(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

namespace {

struct ColumnMoments {
  std::vector<double> mean;
  std::vector<double> norm;  // sqrt of the centered sum of squares
  std::vector<bool> constant;
};

ColumnMoments Moments(const Eigen::MatrixXd& scores) {
  const Eigen::Index n = scores.rows();
  const Eigen::Index d = scores.cols();
  ColumnMoments mo;
  mo.mean.resize(d);
  mo.norm.resize(d);
  mo.constant.resize(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) sum += scores(r, c);
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    double ss = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double dv = scores(r, c) - mean;
      ss += dv * dv;
    }
    mo.mean[c] = mean;
    mo.norm[c] = std::sqrt(ss);
    mo.constant[c] = n < 2 || ss / static_cast<double>(n) < 1e-12;
  }
  return mo;
}

double PairCorrelation(const Eigen::MatrixXd& scores, const ColumnMoments& mo,
                       Eigen::Index a, Eigen::Index b) {
  if (mo.constant[a] || mo.constant[b]) return 0.0;
  double cross = 0.0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    cross += (scores(r, a) - mo.mean[a]) * (scores(r, b) - mo.mean[b]);
  }
  return std::clamp(cross / (mo.norm[a] * mo.norm[b]), -1.0, 1.0);
}

}  // namespace

namespace serial {

Eigen::MatrixXd PearsonMatrix(const Eigen::MatrixXd& scores) {
  const Eigen::Index d = scores.cols();
  const ColumnMoments mo = Moments(scores);
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      out(a, b) = out(b, a) = PairCorrelation(scores, mo, a, b);
    }
  }
  return out;
}

}  // namespace serial

namespace omp {

Eigen::MatrixXd PearsonMatrix(const Eigen::MatrixXd& scores) {
  const Eigen::Index d = scores.cols();
  const ColumnMoments mo = Moments(scores);
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(d, d);
  const long pairs = static_cast<long>(d * (d - 1) / 2);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> index;
  index.reserve(static_cast<std::size_t>(pairs));
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) index.emplace_back(a, b);
  }
#pragma omp parallel for schedule(dynamic)
  for (long p = 0; p < pairs; ++p) {
    const auto [a, b] = index[static_cast<std::size_t>(p)];
    const double rho = PairCorrelation(scores, mo, a, b);
    out(a, b) = rho;
    out(b, a) = rho;
  }
  return out;
}

}  // namespace omp

Eigen::MatrixXd EstimateCorrelation(const Eigen::MatrixXd& scores) {
  return NearestPsd(omp::PearsonMatrix(scores));
}

void SynthesizerConfig::Validate() const {
  if (epochs < 1) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (!(correlation_shrinkage >= 0.0 && correlation_shrinkage <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "correlation_shrinkage must lie in [0,1]");
  }
  if (backend == BackendKind::kExternal && !external) {
    throw Error(ErrorCode::kInvalidArgument, "external backend without descriptor");
  }
}

std::string BackendName(const SynthesizerConfig& config) {
  switch (config.backend) {
    case BackendKind::kGaussianCopula: return "gaussian_copula";
    case BackendKind::kIndependent: return "independent";
    case BackendKind::kExternal: return config.external ? config.external->name : "external";
  }
  return "unknown";
}

CopulaModel Fit(const Dataset& train, const SynthesizerConfig& config,
                const Metadata& /*metadata*/) {
  config.Validate();
  if (config.backend == BackendKind::kExternal) {
    throw Error(ErrorCode::kInvalidArgument,
                "external backends are fitted by their own process");
  }
  if (train.row_count() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit on an empty table");
  }
  CopulaModel model;
  model.schema = train.schema();
  model.fitted_rows = train.row_count();
  model.seed = config.seed;
  model.epochs = config.epochs;
  model.correlation_shrinkage = config.correlation_shrinkage;
  model.backend = config.backend;

  const std::size_t d = train.column_count();
  const std::size_t n = train.row_count();
  model.marginals.reserve(d);
  for (std::size_t c = 0; c < d; ++c) model.marginals.push_back(FitMarginal(train.column(c)));

  const auto dim = static_cast<Eigen::Index>(d);
  if (config.backend == BackendKind::kIndependent) {
    model.correlation = Eigen::MatrixXd::Identity(dim, dim);
  } else {
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(n), dim);
    Rng rng(config.seed);
    for (std::size_t c = 0; c < d; ++c) {
      const auto col = ToNormalScores(train.column(c), model.marginals[c], rng);
      for (std::size_t r = 0; r < n; ++r) {
        scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
      }
    }
    const double lambda = config.correlation_shrinkage;
    model.correlation = (1.0 - lambda) * EstimateCorrelation(scores) +
                        lambda * Eigen::MatrixXd::Identity(dim, dim);
  }
  model.cholesky = Cholesky(model.correlation);
  return model;
}

namespace {

struct SampleBuffers {
  std::vector<Column> columns;
};

SampleBuffers PrepareSample(const CopulaModel& model, std::size_t n_rows) {
  if (!model.fitted()) throw Error(ErrorCode::kNotFitted, "model is not fitted");
  SampleBuffers buf;
  for (std::size_t c = 0; c < model.marginals.size(); ++c) {
    Column col;
    col.kind = model.schema.columns[c].kind;
    if (const auto* cat = std::get_if<CategoricalMarginal>(&model.marginals[c])) {
      col.categories = cat->categories;
      col.codes.resize(n_rows);
    } else {
      col.values.resize(n_rows);
    }
    buf.columns.push_back(std::move(col));
  }
  return buf;
}

// Standard-normal innovations, row-major, drawn sequentially so the stream
// does not depend on the thread count.
std::vector<double> DrawInnovations(std::size_t n_rows, std::size_t d,
                                    std::uint64_t seed) {
  std::vector<double> e(n_rows * d);
  Rng rng(seed);
  for (double& x : e) x = rng.Normal();
  return e;
}

void TransformRow(const CopulaModel& model, const std::vector<double>& e,
                  std::size_t r, std::vector<Column>& columns) {
  const std::size_t d = model.marginals.size();
  const double* row = e.data() + r * d;
  for (std::size_t i = 0; i < d; ++i) {
    double z = 0.0;
    for (std::size_t k = 0; k <= i; ++k) {
      z += model.cholesky(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * row[k];
    }
    const double u = StdNormalCdf(z);
    if (const auto* num = std::get_if<NumericMarginal>(&model.marginals[i])) {
      columns[i].values[r] = InverseNumeric(*num, u);
    } else {
      columns[i].codes[r] = static_cast<std::int32_t>(
          InverseCategorical(std::get<CategoricalMarginal>(model.marginals[i]), u));
    }
  }
}

}  // namespace

namespace serial {

Dataset Sample(const CopulaModel& model, std::size_t n_rows, std::uint64_t seed) {
  SampleBuffers buf = PrepareSample(model, n_rows);
  const auto e = DrawInnovations(n_rows, model.marginals.size(), seed);
  for (std::size_t r = 0; r < n_rows; ++r) TransformRow(model, e, r, buf.columns);
  return Dataset(model.schema, std::move(buf.columns));
}

}  // namespace serial

Dataset Sample(const CopulaModel& model, std::size_t n_rows, std::uint64_t seed) {
  SampleBuffers buf = PrepareSample(model, n_rows);
  const auto e = DrawInnovations(n_rows, model.marginals.size(), seed);
  const long rows = static_cast<long>(n_rows);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    TransformRow(model, e, static_cast<std::size_t>(r), buf.columns);
  }
  return Dataset(model.schema, std::move(buf.columns));
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

std::string BackendTag(BackendKind kind) {
  switch (kind) {
    case BackendKind::kGaussianCopula: return "gaussian_copula";
    case BackendKind::kIndependent: return "independent";
    case BackendKind::kExternal: return "external";
  }
  return "unknown";
}

}  // namespace

std::string ModelToJson(const CopulaModel& model) {
  if (!model.fitted()) throw Error(ErrorCode::kNotFitted, "model is not fitted");
  nlohmann::ordered_json doc;
  nlohmann::ordered_json marginals = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < model.marginals.size(); ++c) {
    nlohmann::ordered_json m;
    m["column"] = model.schema.columns[c].name;
    if (const auto* num = std::get_if<NumericMarginal>(&model.marginals[c])) {
      m["kind"] = "numeric";
      m["sorted_values"] = num->sorted_values;
    } else {
      const auto& cat = std::get<CategoricalMarginal>(model.marginals[c]);
      m["kind"] = "categorical";
      nlohmann::ordered_json cats = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < cat.categories.size(); ++k) {
        nlohmann::ordered_json entry;
        entry["label"] = cat.categories[k];
        entry["frequency"] = cat.frequencies[k];
        entry["lower"] = cat.lower[k];
        entry["upper"] = cat.upper[k];
        cats.push_back(std::move(entry));
      }
      m["categories"] = std::move(cats);
    }
    marginals.push_back(std::move(m));
  }
  doc["marginals"] = std::move(marginals);
  nlohmann::ordered_json corr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.correlation.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(model.correlation.cols()));
    for (Eigen::Index j = 0; j < model.correlation.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = model.correlation(i, j);
    }
    corr.push_back(row);
  }
  doc["correlation"] = std::move(corr);
  nlohmann::ordered_json order = nlohmann::ordered_json::array();
  for (const auto& c : model.schema.columns) order.push_back(c.name);
  doc["column_order"] = std::move(order);
  doc["fitted_rows"] = model.fitted_rows;
  doc["seed"] = model.seed;
  doc["backend"] = BackendTag(model.backend);
  doc["epochs"] = model.epochs;
  doc["correlation_shrinkage"] = model.correlation_shrinkage;
  return doc.dump(2) + "\n";
}

CopulaModel ModelFromJson(std::string_view text) {
  CopulaModel model;
  try {
    const auto doc = nlohmann::json::parse(text);
    const auto order = doc.at("column_order").get<std::vector<std::string>>();
    const auto& marginals = doc.at("marginals");
    if (marginals.size() != order.size()) {
      throw Error(ErrorCode::kSchemaMismatch, "marginals and column_order differ");
    }
    for (std::size_t c = 0; c < order.size(); ++c) {
      const auto& m = marginals.at(c);
      const std::string kind = m.at("kind").get<std::string>();
      if (kind == "numeric") {
        model.schema.columns.push_back({order[c], ColumnKind::kNumeric});
        model.marginals.emplace_back(
            NumericMarginal{m.at("sorted_values").get<std::vector<double>>()});
      } else if (kind == "categorical") {
        model.schema.columns.push_back({order[c], ColumnKind::kCategorical});
        CategoricalMarginal cat;
        for (const auto& entry : m.at("categories")) {
          cat.categories.push_back(entry.at("label").get<std::string>());
          cat.frequencies.push_back(entry.at("frequency").get<double>());
          cat.lower.push_back(entry.at("lower").get<double>());
          cat.upper.push_back(entry.at("upper").get<double>());
        }
        if (cat.categories.empty()) {
          throw Error(ErrorCode::kParseError, "categorical marginal without categories");
        }
        model.marginals.emplace_back(std::move(cat));
      } else {
        throw Error(ErrorCode::kParseError, "unknown marginal kind '" + kind + "'");
      }
    }
    const auto d = static_cast<Eigen::Index>(order.size());
    model.correlation.resize(d, d);
    const auto& corr = doc.at("correlation");
    if (static_cast<Eigen::Index>(corr.size()) != d) {
      throw Error(ErrorCode::kSchemaMismatch, "correlation has wrong shape");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto row = corr.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != d) {
        throw Error(ErrorCode::kSchemaMismatch, "correlation has wrong shape");
      }
      for (Eigen::Index j = 0; j < d; ++j) model.correlation(i, j) = row[static_cast<std::size_t>(j)];
    }
    model.fitted_rows = doc.at("fitted_rows").get<std::size_t>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.epochs = doc.value("epochs", 1);
    model.correlation_shrinkage = doc.value("correlation_shrinkage", 0.0);
    const std::string backend = doc.value("backend", std::string("gaussian_copula"));
    model.backend = backend == "independent" ? BackendKind::kIndependent
                                             : BackendKind::kGaussianCopula;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("model JSON: ") + e.what());
  }
  model.cholesky = Cholesky(model.correlation);
  return model;
}

}  // namespace fairsynth
