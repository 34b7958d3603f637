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

// Distributional fidelity between a real and a synthetic table.
//
// Column shapes: KS complement (numeric) or TV complement (categorical).
// Pair trends: correlation similarity for numeric/numeric pairs, contingency
// similarity otherwise, with numeric members binned at the real column's
// quartiles. The overall score is the mean of the two averages.

#ifndef FAIRSYNTH_QUALITY_HPP_
#define FAIRSYNTH_QUALITY_HPP_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fairsynth/schema.hpp"

namespace fairsynth {

inline constexpr const char* kKsComplement = "KSComplement";
inline constexpr const char* kTvComplement = "TVComplement";
inline constexpr const char* kCorrelationSimilarity = "CorrelationSimilarity";
inline constexpr const char* kContingencySimilarity = "ContingencySimilarity";

// 1 - sup_x |F_real(x) - F_synth(x)|.
double KsComplement(std::span<const double> real, std::span<const double> synth);

// 1 - TVD of the empirical category frequencies.
double TvComplement(std::span<const std::string> real,
                    std::span<const std::string> synth);

// Pearson correlation; 0 when either side has zero variance.
double Pearson(std::span<const double> a, std::span<const double> b);

// 1 - |rho_real - rho_synth| / 2.
double CorrelationSimilarity(std::span<const double> real_a,
                             std::span<const double> real_b,
                             std::span<const double> synth_a,
                             std::span<const double> synth_b);

// 1 - TVD of the empirical joint frequencies.
double ContingencySimilarity(std::span<const std::string> real_a,
                             std::span<const std::string> real_b,
                             std::span<const std::string> synth_a,
                             std::span<const std::string> synth_b);

// Quartile edges (linear interpolation between order statistics).
std::array<double, 3> QuartileEdges(std::span<const double> real);
// Right-closed bins: 0 for x <= e0, ..., 3 for x > e2.
int QuartileBin(const std::array<double, 3>& edges, double x);

struct ShapeScore {
  std::string column;
  std::string metric;
  double score = 0.0;
};

struct PairTrend {
  std::string column_a;
  std::string column_b;
  std::string metric;
  double score = 0.0;
};

struct QualityReport {
  double overall_score = 0.0;
  double shapes_average = 0.0;
  double trends_average = 0.0;
  std::vector<ShapeScore> shapes;
  std::vector<PairTrend> pair_trends;
};

QualityReport ComputeQualityReport(const Dataset& real, const Dataset& synth);

// Per-pair kernels; the omp variant is bit-identical to the serial one.
namespace serial {
std::vector<PairTrend> PairTrends(const Dataset& real, const Dataset& synth);
}  // namespace serial
namespace omp {
std::vector<PairTrend> PairTrends(const Dataset& real, const Dataset& synth);
}  // namespace omp

}  // namespace fairsynth

#endif  // FAIRSYNTH_QUALITY_HPP_
