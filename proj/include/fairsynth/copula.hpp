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

// Gaussian-copula synthesizer with empirical marginals.
//
// Fitting maps every column to normal scores (numeric columns through their
// average rank r / (n + 1), categorical columns through a uniform draw inside
// the category's cumulative-frequency interval), estimates the Pearson
// correlation of the scores, repairs it to the nearest PSD correlation matrix
// and factorizes it. Sampling reverses the process: correlated normals are
// pushed through Phi and then through each column's inverse marginal.
//
// The independent backend is the same model with the correlation pinned to
// the identity.

#ifndef FAIRSYNTH_COPULA_HPP_
#define FAIRSYNTH_COPULA_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairsynth/rng.hpp"
#include "fairsynth/schema.hpp"

namespace fairsynth {

struct NumericMarginal {
  std::vector<double> sorted_values;
};

// Categories ordered by descending frequency, ties by label ascending.
// Category k owns the interval [lower[k], upper[k]).
struct CategoricalMarginal {
  std::vector<std::string> categories;
  std::vector<double> frequencies;
  std::vector<double> lower;
  std::vector<double> upper;

  std::optional<std::size_t> IndexOf(std::string_view label) const;
};

using MarginalModel = std::variant<NumericMarginal, CategoricalMarginal>;

NumericMarginal FitNumericMarginal(std::span<const double> values);
CategoricalMarginal FitCategoricalMarginal(std::span<const std::string> labels);
MarginalModel FitMarginal(const Column& column);

// Forward copula transform of one column.
std::vector<double> ToNormalScores(const Column& column,
                                   const MarginalModel& marginal, Rng& rng);

// Inverse marginals. `u` is a probability in [0, 1].
double InverseNumeric(const NumericMarginal& marginal, double u);
std::size_t InverseCategorical(const CategoricalMarginal& marginal, double u);

inline constexpr double kPsdEpsilon = 1e-6;

// Eigenvalue clipping at `eps` followed by rescaling to unit diagonal.
Eigen::MatrixXd NearestPsd(const Eigen::MatrixXd& m, double eps = kPsdEpsilon);

// Lower-triangular L with L * L^T = m. Throws Error(kDomainError) if m is
// not positive definite.
Eigen::MatrixXd Cholesky(const Eigen::MatrixXd& m);

// Pearson correlation over the columns of `scores` (n x d). Columns with
// variance below 1e-12 are uncorrelated with everything else. The result is
// passed through NearestPsd.
Eigen::MatrixXd EstimateCorrelation(const Eigen::MatrixXd& scores);

// Data-parallel kernels with their serial references. The omp variants are
// bit-identical to the serial ones.
namespace serial {
Eigen::MatrixXd PearsonMatrix(const Eigen::MatrixXd& scores);
}  // namespace serial
namespace omp {
Eigen::MatrixXd PearsonMatrix(const Eigen::MatrixXd& scores);
}  // namespace omp

enum class BackendKind { kGaussianCopula, kIndependent, kExternal };

// Command-line adapter for synthesizers implemented elsewhere. `command`
// entries may contain {train_csv} {metadata_json} {rows} {epochs} {seed}
// {out_csv} placeholders.
struct ExternalBackend {
  std::string name;
  std::vector<std::string> command;
  int timeout_seconds = 600;
};

struct SynthesizerConfig {
  BackendKind backend = BackendKind::kGaussianCopula;
  std::optional<ExternalBackend> external;
  int epochs = 20;
  std::uint64_t seed = 0;
  double correlation_shrinkage = 0.0;

  void Validate() const;
};

std::string BackendName(const SynthesizerConfig& config);

struct CopulaModel {
  TableSchema schema;
  std::vector<MarginalModel> marginals;
  Eigen::MatrixXd correlation;
  Eigen::MatrixXd cholesky;
  std::size_t fitted_rows = 0;
  std::uint64_t seed = 0;
  int epochs = 0;
  double correlation_shrinkage = 0.0;
  BackendKind backend = BackendKind::kGaussianCopula;

  bool fitted() const { return !marginals.empty(); }
};

// Closed-form fit; `config.epochs` is recorded only.
CopulaModel Fit(const Dataset& train, const SynthesizerConfig& config,
                const Metadata& metadata);

Dataset Sample(const CopulaModel& model, std::size_t n_rows, std::uint64_t seed);

namespace serial {
Dataset Sample(const CopulaModel& model, std::size_t n_rows, std::uint64_t seed);
}  // namespace serial

// JSON persistence with fields marginals, correlation, column_order,
// fitted_rows, seed (plus backend bookkeeping). The Cholesky factor is
// recomputed on load.
std::string ModelToJson(const CopulaModel& model);
CopulaModel ModelFromJson(std::string_view text);

}  // namespace fairsynth

#endif  // FAIRSYNTH_COPULA_HPP_
