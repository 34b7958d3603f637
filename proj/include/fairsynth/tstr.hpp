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

// Train-on-synthetic / test-on-real fairness evaluation: a logistic
// regression fitted on synthetic rows is scored on real holdout rows, and the
// per-group false positive rates are compared within each protected
// attribute.

#ifndef FAIRSYNTH_TSTR_HPP_
#define FAIRSYNTH_TSTR_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairsynth/schema.hpp"

namespace fairsynth {

// One encoded source column: a standardized numeric feature or a one-hot
// block. Label columns are never encoded; protected attributes are.
struct FeatureBlock {
  std::string column;
  ColumnKind kind = ColumnKind::kNumeric;
  double mean = 0.0;
  double stddev = 1.0;
  bool constant = false;  // zero variance: encodes as 0
  std::vector<std::string> categories;
};

struct Encoder {
  std::vector<FeatureBlock> blocks;
  std::vector<std::string> feature_names;

  std::size_t dimension() const { return feature_names.size(); }
};

Encoder FitEncoder(const Dataset& synth_train, const Metadata& metadata);

struct GroupColumn {
  std::string attribute;
  std::vector<std::string> names;  // indexed by code
  std::vector<int> codes;          // one per row
};

struct Encoded {
  Eigen::MatrixXd x;
  std::vector<int> y;
  std::vector<GroupColumn> groups;  // metadata.protected_attributes order
  std::size_t unseen_cells = 0;
  std::vector<std::string> warnings;
};

Encoded Encode(const Encoder& encoder, const Dataset& data, const Metadata& metadata);

struct LogisticHyperparams {
  double learning_rate = 0.1;
  double l2_strength = 1e-3;
  int max_iters = 2000;
  double tolerance = 1e-6;
  double threshold = 0.5;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  LogisticHyperparams hyperparams;
  bool single_class = false;
  int iterations = 0;
  std::vector<double> loss_checkpoints;  // every 10 iterations
};

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
};

// Mean logistic loss + (l2/2)|w|^2 and its gradient; bias unpenalized.
namespace serial {
LossGrad LogisticLossGrad(const Eigen::MatrixXd& x, std::span<const int> y,
                          const Eigen::VectorXd& w, double b, double l2);
}  // namespace serial
namespace omp {
// Sums fixed 256-row blocks in parallel and combines them in block order, so
// the result does not depend on the thread count.
LossGrad LogisticLossGrad(const Eigen::MatrixXd& x, std::span<const int> y,
                          const Eigen::VectorXd& w, double b, double l2);
}  // namespace omp

// Full-batch gradient descent from zero with step halving whenever a step
// would increase the loss. A single-class `y` yields a constant model.
LogisticModel TrainLogreg(const Eigen::MatrixXd& x, std::span<const int> y,
                          const LogisticHyperparams& hyperparams,
                          std::uint64_t seed);

double Sigmoid(double s);

std::vector<int> Predict(const LogisticModel& model, const Eigen::MatrixXd& x);

struct GroupRate {
  std::size_t negatives = 0;
  std::size_t false_positives = 0;
  std::optional<double> fpr;  // empty when negatives < min_support
};

// Keyed by group code.
std::map<int, GroupRate> GroupFpr(std::span<const int> y_true,
                                  std::span<const int> y_pred,
                                  std::span<const int> groups,
                                  std::size_t min_support);

struct FprRatio {
  enum class Kind { kFinite, kInfinite, kUndefined };
  Kind kind = Kind::kUndefined;
  double value = 0.0;

  static FprRatio Finite(double v) { return {Kind::kFinite, v}; }
  static FprRatio Infinite() { return {Kind::kInfinite, 0.0}; }
  static FprRatio Undefined() { return {Kind::kUndefined, 0.0}; }
  bool defined() const { return kind != Kind::kUndefined; }
  bool operator==(const FprRatio&) const = default;
};

// max/min over defined rates; INFINITE when only the minimum is zero, 1 when
// all are zero, UNDEFINED with fewer than two defined rates.
FprRatio RelativeFpr(std::span<const double> defined_rates);

struct MaxRelativeFpr {
  FprRatio overall;
  std::vector<FprRatio> per_attribute;
};

// Overall is the largest defined per-attribute value; INFINITE dominates.
MaxRelativeFpr MaxRelativeFprOf(const std::vector<std::vector<double>>& rates_per_attribute);

struct AttributeFairness {
  std::string attribute;
  std::map<std::string, GroupRate> groups;
  FprRatio max_rel_fpr;
};

struct ExcludedGroup {
  std::string attribute;
  std::string group;
  std::string reason;
};

struct FairnessReport {
  std::vector<AttributeFairness> by_attribute;
  FprRatio max_rel_fpr;
  bool degenerate = false;
  double threshold = 0.5;
  std::vector<ExcludedGroup> excluded_groups;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kDefaultMinSupport = 5;

// Group-wise FPR analysis of fixed holdout predictions.
FairnessReport FairnessFromPredictions(const Dataset& holdout,
                                       const Metadata& metadata,
                                       std::span<const int> predictions,
                                       double threshold,
                                       std::size_t min_support = kDefaultMinSupport);

FairnessReport ComputeFairnessReport(const Dataset& synth, const Dataset& holdout,
                                     const Metadata& metadata,
                                     const LogisticHyperparams& hyperparams,
                                     std::uint64_t seed,
                                     std::size_t min_support = kDefaultMinSupport);

}  // namespace fairsynth

#endif  // FAIRSYNTH_TSTR_HPP_
