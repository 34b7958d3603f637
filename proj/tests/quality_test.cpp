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


#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fairsynth/error.hpp"
#include "fairsynth/quality.hpp"
#include "fairsynth/reports.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace fairsynth {
namespace {

using testing::CatCol;
using testing::MakeTable;
using testing::NumCol;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIoError;
}

using Strings = std::vector<std::string>;
using Doubles = std::vector<double>;

TEST(KsComplement, Examples) {
  EXPECT_EQ(KsComplement(Doubles{3, 1, 2, 2}, Doubles{2, 3, 2, 1}), 1.0);
  EXPECT_EQ(KsComplement(Doubles{0.1, 0.5, 0.9}, Doubles{10.2, 10.7}), 0.0);
  EXPECT_EQ(KsComplement(Doubles{0, 0, 1, 1}, Doubles{0, 1, 1, 1}), 0.75);
}

TEST(KsComplement, EmptyColumn) {
  EXPECT_EQ(CodeOf([] { KsComplement(Doubles{}, Doubles{1}); }), ErrorCode::kEmptyColumn);
  EXPECT_EQ(CodeOf([] { KsComplement(Doubles{1}, Doubles{}); }), ErrorCode::kEmptyColumn);
}

TEST(TvComplement, Examples) {
  EXPECT_EQ(TvComplement(Strings{"a", "b", "a"}, Strings{"b", "a", "a"}), 1.0);
  EXPECT_EQ(TvComplement(Strings{"a", "b"}, Strings{"c", "d", "c"}), 0.0);
  EXPECT_EQ(TvComplement(Strings{"a", "a", "a", "b"}, Strings{"a", "b"}), 0.75);
}

TEST(TvComplement, EmptyColumn) {
  EXPECT_EQ(CodeOf([] { TvComplement(Strings{}, Strings{"a"}); }), ErrorCode::kEmptyColumn);
}

TEST(CorrelationSimilarity, Examples) {
  const Doubles x{1, 2, 3, 4};
  const Doubles up{2, 4, 6, 8};
  const Doubles down{8, 6, 4, 2};
  EXPECT_EQ(CorrelationSimilarity(x, up, x, up), 1.0);
  EXPECT_EQ(CorrelationSimilarity(x, up, x, down), 0.0);
  EXPECT_EQ(CorrelationSimilarity(x, Doubles{5, 5, 5, 5}, x, up), 0.5);
}

TEST(CorrelationSimilarity, FromCorrelationsHalfAndTenth) {
  // y = rho*x + sqrt(1-rho^2)*e with e centred, orthogonal to x, same norm.
  const Doubles x{1, -1, 0, 0};
  const Doubles e{0, 0, 1, -1};
  auto mix = [&](double rho) {
    Doubles y;
    for (int i = 0; i < 4; ++i) y.push_back(rho * x[i] + std::sqrt(1 - rho * rho) * e[i]);
    return y;
  };
  EXPECT_NEAR(Pearson(x, mix(0.5)), 0.5, 1e-15);
  EXPECT_NEAR(CorrelationSimilarity(x, mix(0.5), x, mix(0.1)), 0.8, 1e-12);
}

TEST(Pearson, ZeroVarianceConvention) {
  EXPECT_EQ(Pearson(Doubles{1, 1, 1}, Doubles{1, 2, 3}), 0.0);
  EXPECT_EQ(Pearson(Doubles{1}, Doubles{2}), 0.0);
  EXPECT_EQ(CodeOf([] { Pearson(Doubles{1, 2}, Doubles{1}); }), ErrorCode::kLengthMismatch);
}

TEST(ContingencySimilarity, Examples) {
  const Strings a{"x", "x", "y", "y"};
  const Strings b{"p", "q", "p", "q"};
  EXPECT_EQ(ContingencySimilarity(a, b, a, b), 1.0);
  EXPECT_EQ(ContingencySimilarity(a, b, Strings{"z"}, Strings{"z"}), 0.0);
  EXPECT_EQ(ContingencySimilarity(a, b, Strings{"x", "x"}, Strings{"p", "p"}), 0.25);
}

TEST(QuartileBins, EdgesAndRightClosedBins) {
  const auto e = QuartileEdges(Doubles{4, 1, 3, 2, 5});
  EXPECT_EQ(e, (std::array<double, 3>{2, 3, 4}));
  EXPECT_EQ(QuartileBin(e, 2.0), 0);
  EXPECT_EQ(QuartileBin(e, 2.5), 1);
  EXPECT_EQ(QuartileBin(e, 4.0), 2);
  EXPECT_EQ(QuartileBin(e, 100.0), 3);
  EXPECT_EQ(QuartileBin(e, -100.0), 0);
  const auto interp = QuartileEdges(Doubles{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(interp[0], 1.75);
  EXPECT_DOUBLE_EQ(interp[1], 2.5);
  EXPECT_DOUBLE_EQ(interp[2], 3.25);
}

TEST(QualityReport, SelfIdentityOnDemoTable) {
  const Dataset d = MakeDemoDataset(DemoSpec{});
  const QualityReport r = ComputeQualityReport(d, d);
  EXPECT_NEAR(r.overall_score, 1.0, 1e-9);
  EXPECT_EQ(r.shapes.size(), d.column_count());
  EXPECT_EQ(r.pair_trends.size(), d.column_count() * (d.column_count() - 1) / 2);
}

TEST(QualityReport, MetricChoicePerKind) {
  const Dataset d = MakeTable({{"n1", NumCol({1, 2, 3, 4})},
                               {"n2", NumCol({4, 3, 2, 1})},
                               {"c", CatCol({"a", "b", "a", "b"})}});
  const QualityReport r = ComputeQualityReport(d, d);
  EXPECT_EQ(r.shapes[0].metric, kKsComplement);
  EXPECT_EQ(r.shapes[2].metric, kTvComplement);
  ASSERT_EQ(r.pair_trends.size(), 3u);
  EXPECT_EQ(r.pair_trends[0].metric, kCorrelationSimilarity);
  EXPECT_EQ(r.pair_trends[1].metric, kContingencySimilarity);
  EXPECT_EQ(r.pair_trends[2].metric, kContingencySimilarity);
}

TEST(QualityReport, MixedPairBinsSyntheticWithRealEdges) {
  // Real n = {1,2,3,4} gives edges {1.75, 2.5, 3.25}. Synthetic values far
  // outside the real range land in the extreme bins.
  const Dataset real = MakeTable({{"n", NumCol({1, 2, 3, 4})}, {"c", CatCol({"a", "a", "b", "b"})}});
  const Dataset synth =
      MakeTable({{"n", NumCol({-50, -40, 90, 100})}, {"c", CatCol({"a", "a", "b", "b"})}});
  const QualityReport r = ComputeQualityReport(real, synth);
  // Real joint: (q1,a)(q2,a)(q3,b)(q4,b); synth: (q1,a)x2 (q4,b)x2.
  const double expected = oracle::ContingencySimilarity({"q1", "q2", "q3", "q4"}, {"a", "a", "b", "b"},
                                                        {"q1", "q1", "q4", "q4"}, {"a", "a", "b", "b"});
  EXPECT_EQ(r.pair_trends[0].score, expected);
  EXPECT_EQ(expected, 0.5);
}

TEST(QualityReport, AveragingRule) {
  const Dataset real = MakeTable({{"a", NumCol({1, 2, 3, 4})}, {"b", NumCol({1, 2, 3, 4})},
                                  {"c", CatCol({"x", "y", "x", "y"})}});
  const Dataset synth = MakeTable({{"a", NumCol({1, 2, 3, 9})}, {"b", NumCol({4, 3, 2, 1})},
                                   {"c", CatCol({"x", "x", "x", "y"})}});
  const QualityReport r = ComputeQualityReport(real, synth);
  double s = 0, t = 0;
  for (const auto& x : r.shapes) s += x.score;
  for (const auto& x : r.pair_trends) t += x.score;
  EXPECT_NEAR(r.shapes_average, s / 3, 1e-15);
  EXPECT_NEAR(r.trends_average, t / 3, 1e-15);
  EXPECT_NEAR(r.overall_score, (r.shapes_average + r.trends_average) / 2, 1e-12);
}

TEST(QualityReport, SingleColumnUsesShapesForTrends) {
  const Dataset real = MakeTable({{"c", CatCol({"a", "a", "a", "b"})}});
  const Dataset synth = MakeTable({{"c", CatCol({"a", "b"})}});
  const QualityReport r = ComputeQualityReport(real, synth);
  EXPECT_TRUE(r.pair_trends.empty());
  EXPECT_EQ(r.trends_average, r.shapes_average);
  EXPECT_EQ(r.overall_score, 0.75);
}

TEST(QualityReport, SchemaMismatch) {
  const Dataset a = MakeTable({{"x", NumCol({1, 2})}});
  const Dataset b = MakeTable({{"y", NumCol({1, 2})}});
  EXPECT_EQ(CodeOf([&] { ComputeQualityReport(a, b); }), ErrorCode::kSchemaMismatch);
}

// ---------------------------------------------------------------------------
// Properties against brute-force oracles on random small instances.

Doubles RandomNumbers(std::mt19937_64& gen, std::size_t n) {
  // Small integer support so ties are common.
  Doubles v;
  const int range = 1 + static_cast<int>(gen() % 12);
  for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<double>(gen() % range) * 0.5);
  return v;
}

Strings RandomLabels(std::mt19937_64& gen, std::size_t n, int alphabet) {
  Strings v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(std::string(1, static_cast<char>('a' + gen() % alphabet)));
  return v;
}

constexpr int kPropertyCases = 1000;

TEST(QualityProperties, KsMatchesOracle) {
  std::mt19937_64 gen(101);
  for (int t = 0; t < kPropertyCases; ++t) {
    const Doubles r = RandomNumbers(gen, 1 + gen() % 50);
    const Doubles s = RandomNumbers(gen, 1 + gen() % 50);
    const double got = KsComplement(r, s);
    ASSERT_EQ(got, oracle::KsComplement(r, s)) << "case " << t;
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
  }
}

TEST(QualityProperties, TvMatchesOracleAndIsSymmetric) {
  std::mt19937_64 gen(102);
  for (int t = 0; t < kPropertyCases; ++t) {
    const int alphabet = 1 + static_cast<int>(gen() % 6);
    const Strings r = RandomLabels(gen, 1 + gen() % 50, alphabet);
    const Strings s = RandomLabels(gen, 1 + gen() % 50, alphabet + static_cast<int>(gen() % 2));
    const double got = TvComplement(r, s);
    ASSERT_EQ(got, oracle::TvComplement(r, s)) << "case " << t;
    ASSERT_EQ(got, TvComplement(s, r));
  }
}

TEST(QualityProperties, ContingencyMatchesOracle) {
  std::mt19937_64 gen(103);
  for (int t = 0; t < kPropertyCases; ++t) {
    const std::size_t n = 1 + gen() % 50, m = 1 + gen() % 50;
    const Strings ra = RandomLabels(gen, n, 3), rb = RandomLabels(gen, n, 4);
    const Strings sa = RandomLabels(gen, m, 3), sb = RandomLabels(gen, m, 4);
    ASSERT_EQ(ContingencySimilarity(ra, rb, sa, sb), oracle::ContingencySimilarity(ra, rb, sa, sb))
        << "case " << t;
    ASSERT_EQ(ContingencySimilarity(ra, rb, sa, sb), ContingencySimilarity(rb, ra, sb, sa));
  }
}

Dataset RandomMixedTable(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::pair<std::string, Column>> cols;
  cols.emplace_back("n1", NumCol(RandomNumbers(gen, n)));
  cols.emplace_back("c1", testing::CatCol(RandomLabels(gen, n, 3)));
  cols.emplace_back("n2", NumCol(RandomNumbers(gen, n)));
  cols.emplace_back("c2", testing::CatCol(RandomLabels(gen, n, 2)));
  return MakeTable(std::move(cols));
}

Dataset Reorder(const Dataset& d, const std::vector<std::size_t>& order) {
  std::vector<std::pair<std::string, Column>> cols;
  for (std::size_t i : order) cols.emplace_back(d.schema().columns[i].name, d.column(i));
  return MakeTable(std::move(cols));
}

TEST(QualityProperties, ScoresInRangePairSymmetricAndRowPermutationInvariant) {
  std::mt19937_64 gen(104);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 4 + gen() % 40;
    const Dataset real = RandomMixedTable(gen, n);
    const Dataset synth = RandomMixedTable(gen, 2 + gen() % 40);
    const QualityReport base = ComputeQualityReport(real, synth);
    for (const auto& s : base.shapes) ASSERT_TRUE(s.score >= 0.0 && s.score <= 1.0);
    for (const auto& p : base.pair_trends) ASSERT_TRUE(p.score >= 0.0 && p.score <= 1.0);

    // Reversed column order: every unordered pair appears with swapped roles.
    const std::vector<std::size_t> rev{3, 2, 1, 0};
    const QualityReport swapped = ComputeQualityReport(Reorder(real, rev), Reorder(synth, rev));
    for (const auto& p : base.pair_trends) {
      const auto it = std::find_if(swapped.pair_trends.begin(), swapped.pair_trends.end(),
                                   [&](const PairTrend& q) {
                                     return q.column_a == p.column_b && q.column_b == p.column_a;
                                   });
      ASSERT_NE(it, swapped.pair_trends.end());
      ASSERT_EQ(it->score, p.score);
    }

    std::vector<std::size_t> perm(real.row_count());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    const QualityReport permuted = ComputeQualityReport(real.SelectRows(perm), synth);
    ASSERT_NEAR(permuted.overall_score, base.overall_score, 1e-12);
    for (std::size_t i = 0; i < base.shapes.size(); ++i)
      ASSERT_EQ(permuted.shapes[i].score, base.shapes[i].score);
  }
}

}  // namespace
}  // namespace fairsynth
