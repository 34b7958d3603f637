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

#include "fairsynth/tstr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fairsynth/error.hpp"

namespace fairsynth {

Encoder FitEncoder(const Dataset& synth_train, const Metadata& metadata) {
  if (synth_train.row_count() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit an encoder on zero rows");
  }
  Encoder enc;
  const double n = static_cast<double>(synth_train.row_count());
  for (std::size_t c = 0; c < synth_train.column_count(); ++c) {
    const std::string& name = synth_train.schema().columns[c].name;
    if (name == metadata.label_column) continue;
    const Column& col = synth_train.column(c);
    FeatureBlock block;
    block.column = name;
    block.kind = col.kind;
    if (col.kind == ColumnKind::kNumeric) {
      double sum = 0.0;
      for (double v : col.values) sum += v;
      const double mean = sum / n;
      double ss = 0.0;
      for (double v : col.values) ss += (v - mean) * (v - mean);
      const double var = ss / n;
      block.mean = mean;
      if (var < 1e-12) {
        block.constant = true;
        block.stddev = 1.0;
      } else {
        block.stddev = std::sqrt(var);
      }
      enc.feature_names.push_back(name);
    } else {
      std::set<std::string> seen;
      for (std::size_t r = 0; r < col.size(); ++r) seen.insert(col.Label(r));
      block.categories.assign(seen.begin(), seen.end());
      for (const auto& cat : block.categories) enc.feature_names.push_back(name + "=" + cat);
    }
    enc.blocks.push_back(std::move(block));
  }
  return enc;
}

Encoded Encode(const Encoder& encoder, const Dataset& data, const Metadata& metadata) {
  const std::size_t n = data.row_count();
  Encoded out;
  out.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(encoder.dimension()));
  Eigen::Index offset = 0;
  for (const FeatureBlock& block : encoder.blocks) {
    const auto idx = data.schema().IndexOf(block.column);
    if (!idx || data.schema().columns[*idx].kind != block.kind) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "column '" + block.column + "' missing or of a different kind");
    }
    const Column& col = data.column(*idx);
    if (block.kind == ColumnKind::kNumeric) {
      if (!block.constant) {
        for (std::size_t r = 0; r < n; ++r) {
          out.x(static_cast<Eigen::Index>(r), offset) =
              (col.values[r] - block.mean) / block.stddev;
        }
      }
      offset += 1;
      continue;
    }
    // Map this table's codes to one-hot positions once.
    std::vector<Eigen::Index> position(col.categories.size(), -1);
    for (std::size_t k = 0; k < col.categories.size(); ++k) {
      const auto it = std::lower_bound(block.categories.begin(), block.categories.end(),
                                       col.categories[k]);
      if (it != block.categories.end() && *it == col.categories[k]) {
        position[k] = static_cast<Eigen::Index>(it - block.categories.begin());
      }
    }
    std::set<std::string> unseen;
    for (std::size_t r = 0; r < n; ++r) {
      const auto code = static_cast<std::size_t>(col.codes[r]);
      if (position[code] < 0) {
        ++out.unseen_cells;
        unseen.insert(col.categories[code]);
        continue;
      }
      out.x(static_cast<Eigen::Index>(r), offset + position[code]) = 1.0;
    }
    for (const auto& cat : unseen) {
      out.warnings.push_back("column '" + block.column + "': category '" + cat +
                             "' unseen at fit time, encoded as all zeros");
    }
    offset += static_cast<Eigen::Index>(block.categories.size());
  }

  const auto label_idx = data.schema().IndexOf(metadata.label_column);
  if (!label_idx || data.column(*label_idx).kind != ColumnKind::kCategorical) {
    throw Error(ErrorCode::kSchemaMismatch, "label column missing or not categorical");
  }
  const Column& label = data.column(*label_idx);
  out.y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.y[r] = label.Label(r) == metadata.positive_label ? 1 : 0;
  }

  for (const auto& attr : metadata.protected_attributes) {
    const auto idx = data.schema().IndexOf(attr);
    if (!idx || data.column(*idx).kind != ColumnKind::kCategorical) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "protected attribute '" + attr + "' missing or not categorical");
    }
    const Column& col = data.column(*idx);
    GroupColumn g;
    g.attribute = attr;
    g.names = col.categories;
    g.codes.assign(col.codes.begin(), col.codes.end());
    out.groups.push_back(std::move(g));
  }
  return out;
}

double Sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(s)) without overflow.
double Softplus(double s) { return std::max(s, 0.0) + std::log1p(std::exp(-std::fabs(s))); }

void CheckShapes(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& w) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "X and y differ in length");
  }
  if (x.cols() != w.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "weight vector has the wrong size");
  }
}

// Accumulates rows [begin, end) into loss_sum / grad_sum (unnormalized).
void AccumulateRows(const Eigen::MatrixXd& x, std::span<const int> y,
                    const Eigen::VectorXd& w, double b, Eigen::Index begin,
                    Eigen::Index end, double& loss_sum, Eigen::VectorXd& grad_sum,
                    double& grad_b_sum) {
  const Eigen::Index d = x.cols();
  for (Eigen::Index r = begin; r < end; ++r) {
    double s = b;
    for (Eigen::Index j = 0; j < d; ++j) s += x(r, j) * w(j);
    const double yr = static_cast<double>(y[static_cast<std::size_t>(r)]);
    loss_sum += Softplus(s) - yr * s;
    const double residual = Sigmoid(s) - yr;
    for (Eigen::Index j = 0; j < d; ++j) grad_sum(j) += residual * x(r, j);
    grad_b_sum += residual;
  }
}

LossGrad Finish(double loss_sum, Eigen::VectorXd grad_sum, double grad_b_sum,
                const Eigen::VectorXd& w, double l2, Eigen::Index n) {
  LossGrad out;
  const double dn = static_cast<double>(std::max<Eigen::Index>(n, 1));
  out.loss = loss_sum / dn + 0.5 * l2 * w.squaredNorm();
  out.grad_w = grad_sum / dn + l2 * w;
  out.grad_b = grad_b_sum / dn;
  return out;
}

constexpr Eigen::Index kBlockRows = 256;

}  // namespace

namespace serial {

LossGrad LogisticLossGrad(const Eigen::MatrixXd& x, std::span<const int> y,
                          const Eigen::VectorXd& w, double b, double l2) {
  CheckShapes(x, y, w);
  double loss_sum = 0.0;
  double grad_b_sum = 0.0;
  Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(x.cols());
  AccumulateRows(x, y, w, b, 0, x.rows(), loss_sum, grad_sum, grad_b_sum);
  return Finish(loss_sum, std::move(grad_sum), grad_b_sum, w, l2, x.rows());
}

}  // namespace serial

namespace omp {

LossGrad LogisticLossGrad(const Eigen::MatrixXd& x, std::span<const int> y,
                          const Eigen::VectorXd& w, double b, double l2) {
  CheckShapes(x, y, w);
  const Eigen::Index n = x.rows();
  const long blocks = static_cast<long>((n + kBlockRows - 1) / kBlockRows);
  std::vector<double> loss_part(static_cast<std::size_t>(blocks), 0.0);
  std::vector<double> grad_b_part(static_cast<std::size_t>(blocks), 0.0);
  std::vector<Eigen::VectorXd> grad_part(static_cast<std::size_t>(blocks),
                                         Eigen::VectorXd::Zero(x.cols()));
#pragma omp parallel for schedule(static)
  for (long k = 0; k < blocks; ++k) {
    const Eigen::Index begin = static_cast<Eigen::Index>(k) * kBlockRows;
    const Eigen::Index end = std::min(n, begin + kBlockRows);
    const auto slot = static_cast<std::size_t>(k);
    AccumulateRows(x, y, w, b, begin, end, loss_part[slot], grad_part[slot],
                   grad_b_part[slot]);
  }
  double loss_sum = 0.0;
  double grad_b_sum = 0.0;
  Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(x.cols());
  for (std::size_t k = 0; k < static_cast<std::size_t>(blocks); ++k) {
    loss_sum += loss_part[k];
    grad_b_sum += grad_b_part[k];
    grad_sum += grad_part[k];
  }
  return Finish(loss_sum, std::move(grad_sum), grad_b_sum, w, l2, n);
}

}  // namespace omp

LogisticModel TrainLogreg(const Eigen::MatrixXd& x, std::span<const int> y,
                          const LogisticHyperparams& hp, std::uint64_t /*seed*/) {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyDataset, "no training rows");
  if (!(hp.threshold > 0.0 && hp.threshold < 1.0) || !(hp.learning_rate > 0.0) ||
      hp.max_iters < 0 || hp.l2_strength < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid logistic hyperparameters");
  }
  LogisticModel model;
  model.hyperparams = hp;
  model.weights = Eigen::VectorXd::Zero(x.cols());
  const auto positives = std::count(y.begin(), y.end(), 1);
  if (positives == 0 || positives == static_cast<long>(y.size())) {
    // The classifier can only echo the single observed class.
    model.single_class = true;
    model.bias = positives == 0 ? -30.0 : 30.0;
    return model;
  }

  LossGrad current = omp::LogisticLossGrad(x, y, model.weights, model.bias, hp.l2_strength);
  for (int it = 0;; ++it) {
    if (!std::isfinite(current.loss)) {
      throw Error(ErrorCode::kNonFiniteLoss, "logistic loss became non-finite");
    }
    if (it % 10 == 0) model.loss_checkpoints.push_back(current.loss);
    model.iterations = it;
    const double grad_inf =
        std::max(current.grad_w.size() ? current.grad_w.cwiseAbs().maxCoeff() : 0.0,
                 std::fabs(current.grad_b));
    if (it >= hp.max_iters || grad_inf < hp.tolerance) break;

    double step = hp.learning_rate;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      Eigen::VectorXd w = model.weights - step * current.grad_w;
      const double b = model.bias - step * current.grad_b;
      LossGrad next = omp::LogisticLossGrad(x, y, w, b, hp.l2_strength);
      if (std::isfinite(next.loss) && next.loss <= current.loss) {
        model.weights = std::move(w);
        model.bias = b;
        current = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent step left at machine precision
  }
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
    throw Error(ErrorCode::kNonFiniteLoss, "trained weights are not finite");
  }
  return model;
}

std::vector<int> Predict(const LogisticModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(model.weights.size()) + " features, got " +
                    std::to_string(x.cols()));
  }
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double s = x.row(r).dot(model.weights) + model.bias;
    out[static_cast<std::size_t>(r)] = Sigmoid(s) >= model.hyperparams.threshold ? 1 : 0;
  }
  return out;
}

std::map<int, GroupRate> GroupFpr(std::span<const int> y_true,
                                  std::span<const int> y_pred,
                                  std::span<const int> groups,
                                  std::size_t min_support) {
  if (y_true.size() != y_pred.size() || y_true.size() != groups.size()) {
    throw Error(ErrorCode::kLengthMismatch, "y_true, y_pred and groups differ in length");
  }
  std::map<int, GroupRate> out;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    GroupRate& g = out[groups[i]];
    if (y_true[i] == 0) {
      ++g.negatives;
      if (y_pred[i] == 1) ++g.false_positives;
    }
  }
  for (auto& [code, g] : out) {
    (void)code;
    if (g.negatives >= min_support && g.negatives > 0) {
      g.fpr = static_cast<double>(g.false_positives) / static_cast<double>(g.negatives);
    }
  }
  return out;
}

FprRatio RelativeFpr(std::span<const double> rates) {
  if (rates.size() < 2) return FprRatio::Undefined();
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  if (*hi == 0.0) return FprRatio::Finite(1.0);
  if (*lo == 0.0) return FprRatio::Infinite();
  return FprRatio::Finite(*hi / *lo);
}

MaxRelativeFpr MaxRelativeFprOf(const std::vector<std::vector<double>>& rates_per_attribute) {
  MaxRelativeFpr out;
  out.overall = FprRatio::Undefined();
  for (const auto& rates : rates_per_attribute) {
    const FprRatio r = RelativeFpr(rates);
    out.per_attribute.push_back(r);
    if (!r.defined() || out.overall.kind == FprRatio::Kind::kInfinite) continue;
    if (r.kind == FprRatio::Kind::kInfinite || !out.overall.defined() ||
        r.value > out.overall.value) {
      out.overall = r;
    }
  }
  return out;
}

FairnessReport FairnessFromPredictions(const Dataset& holdout, const Metadata& metadata,
                                       std::span<const int> predictions,
                                       double threshold, std::size_t min_support) {
  if (predictions.size() != holdout.row_count()) {
    throw Error(ErrorCode::kLengthMismatch, "one prediction per holdout row required");
  }
  if (holdout.row_count() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "holdout is empty");
  }
  FairnessReport report;
  report.threshold = threshold;
  report.degenerate = std::all_of(predictions.begin(), predictions.end(),
                                  [&](int p) { return p == predictions.front(); });

  const Column& label = holdout.column(metadata.label_column);
  std::vector<int> y(holdout.row_count());
  for (std::size_t r = 0; r < y.size(); ++r) {
    y[r] = label.Label(r) == metadata.positive_label ? 1 : 0;
  }

  std::vector<std::vector<double>> rates_per_attribute;
  for (const auto& attr : metadata.protected_attributes) {
    const Column& col = holdout.column(attr);
    std::vector<int> codes(col.codes.begin(), col.codes.end());
    const auto rates = GroupFpr(y, predictions, codes, min_support);
    AttributeFairness af;
    af.attribute = attr;
    std::vector<double> defined;
    for (const auto& [code, rate] : rates) {
      const std::string& name = col.categories[static_cast<std::size_t>(code)];
      af.groups[name] = rate;
    }
    // Iterate by name so excluded_groups and `defined` are in a stable order.
    for (const auto& [name, rate] : af.groups) {
      if (rate.fpr) {
        defined.push_back(*rate.fpr);
      } else {
        report.excluded_groups.push_back(
            {attr, name,
             "only " + std::to_string(rate.negatives) + " negatives (min_support " +
                 std::to_string(min_support) + ")"});
      }
    }
    rates_per_attribute.push_back(std::move(defined));
    report.by_attribute.push_back(std::move(af));
  }
  const MaxRelativeFpr ratios = MaxRelativeFprOf(rates_per_attribute);
  for (std::size_t i = 0; i < report.by_attribute.size(); ++i) {
    report.by_attribute[i].max_rel_fpr = ratios.per_attribute[i];
  }
  report.max_rel_fpr = ratios.overall;
  if (!report.max_rel_fpr.defined()) {
    report.warnings.push_back("no protected attribute has two groups with defined FPR");
  }
  if (report.degenerate) {
    report.warnings.push_back("holdout predictions are constant (degenerate classifier)");
  }
  return report;
}

FairnessReport ComputeFairnessReport(const Dataset& synth, const Dataset& holdout,
                                     const Metadata& metadata,
                                     const LogisticHyperparams& hyperparams,
                                     std::uint64_t seed, std::size_t min_support) {
  const Encoder encoder = FitEncoder(synth, metadata);
  const Encoded train = Encode(encoder, synth, metadata);
  const Encoded test = Encode(encoder, holdout, metadata);
  const LogisticModel model = TrainLogreg(train.x, train.y, hyperparams, seed);
  const std::vector<int> predictions = Predict(model, test.x);
  FairnessReport report = FairnessFromPredictions(holdout, metadata, predictions,
                                                  hyperparams.threshold, min_support);
  for (const auto& w : test.warnings) report.warnings.push_back("holdout " + w);
  if (model.single_class) {
    report.warnings.push_back("synthetic training rows contain a single label class");
  }
  return report;
}

}  // namespace fairsynth
