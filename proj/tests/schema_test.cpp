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
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "fairsynth/error.hpp"
#include "fairsynth/schema.hpp"
#include "test_support.hpp"

namespace fairsynth {
namespace {

using testing::CatCol;
using testing::MakeTable;
using testing::NumCol;
using testing::TempDir;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIoError;
}

Metadata BasicMetadata() {
  Metadata md;
  md.label_column = "Diagnosis";
  md.positive_label = "yes";
  md.protected_attributes = {"Race"};
  return md;
}

TEST(InferSchema, ManyDistinctDecimalsAreNumeric) {
  RawTable raw;
  raw.header = {"x"};
  for (int i = 0; i < 40; ++i) raw.rows.push_back({std::to_string(1.5 + i * 0.1)});
  EXPECT_EQ(InferSchema(raw).columns[0].kind, ColumnKind::kNumeric);
}

TEST(InferSchema, TextTokensAreCategorical) {
  RawTable raw{{"sex"}, {{"M"}, {"F"}, {"F"}, {"M"}}};
  EXPECT_EQ(InferSchema(raw).columns[0].kind, ColumnKind::kCategorical);
}

TEST(InferSchema, LowCardinalityNumbersAreCategorical) {
  RawTable raw{{"flag"}, {{"0"}, {"1"}, {"0"}, {"1"}}};
  EXPECT_EQ(InferSchema(raw).columns[0].kind, ColumnKind::kCategorical);
}

TEST(InferSchema, CutoffBoundary) {
  // 20 distinct values stay categorical, 21 become numeric.
  RawTable at{{"v"}, {}};
  RawTable above{{"v"}, {}};
  for (int i = 0; i < 20; ++i) at.rows.push_back({std::to_string(i)});
  for (int i = 0; i < 21; ++i) above.rows.push_back({std::to_string(i)});
  EXPECT_EQ(InferSchema(at).columns[0].kind, ColumnKind::kCategorical);
  EXPECT_EQ(InferSchema(above).columns[0].kind, ColumnKind::kNumeric);
}

TEST(InferSchema, DeclaredKindsOverride) {
  RawTable raw{{"flag"}, {{"0"}, {"1"}, {"0"}, {"1"}}};
  EXPECT_EQ(InferSchema(raw, {{"flag", ColumnKind::kNumeric}}).columns[0].kind,
            ColumnKind::kNumeric);
}

TEST(InferSchema, MissingCellsIgnoredForKind) {
  RawTable raw{{"x"}, {}};
  for (int i = 0; i < 30; ++i) raw.rows.push_back({i % 7 == 0 ? "" : std::to_string(i)});
  EXPECT_EQ(InferSchema(raw).columns[0].kind, ColumnKind::kNumeric);
}

TEST(InferSchema, Errors) {
  EXPECT_EQ(CodeOf([] { InferSchema(RawTable{{"a"}, {}}); }), ErrorCode::kEmptyTable);
  EXPECT_EQ(CodeOf([] { InferSchema(RawTable{{}, {{}}}); }), ErrorCode::kEmptyTable);
  EXPECT_EQ(CodeOf([] { InferSchema(RawTable{{"a", "a"}, {{"1", "2"}}}); }),
            ErrorCode::kDuplicateColumnName);
}

TEST(InferSchema, PureFunctionOfBytes) {
  const std::string text = "a,b\n1,x\n2,y\n";
  EXPECT_EQ(InferSchema(ParseCsv(text)), InferSchema(ParseCsv(text)));
}

TEST(ParseCsv, QuotedFieldsAndCrlf) {
  const auto raw = ParseCsv("a,b\r\n\"x,1\",\"he said \"\"hi\"\"\"\r\n\"multi\nline\",2\r\n");
  ASSERT_EQ(raw.rows.size(), 2u);
  EXPECT_EQ(raw.rows[0][0], "x,1");
  EXPECT_EQ(raw.rows[0][1], "he said \"hi\"");
  EXPECT_EQ(raw.rows[1][0], "multi\nline");
}

TEST(ParseCsv, StripsBomAndSkipsBlankLines) {
  const auto raw = ParseCsv("\xEF\xBB\xBF" "a,b\n1,2\n\n3,4\n");
  EXPECT_EQ(raw.header[0], "a");
  EXPECT_EQ(raw.rows.size(), 2u);
}

TEST(ParseCsv, RaggedRowIsParseError) {
  EXPECT_EQ(CodeOf([] { ParseCsv("a,b\n1,2\n3\n"); }), ErrorCode::kParseError);
}

TEST(ParseCsv, UnterminatedQuoteIsParseError) {
  EXPECT_EQ(CodeOf([] { ParseCsv("a\n\"open\n"); }), ErrorCode::kParseError);
}

TEST(ParseDecimal, StrictGrammar) {
  EXPECT_EQ(ParseDecimal("1.5"), 1.5);
  EXPECT_EQ(ParseDecimal("-2e3"), -2000.0);
  EXPECT_EQ(ParseDecimal(" 7 "), 7.0);
  EXPECT_FALSE(ParseDecimal("1,5"));
  EXPECT_FALSE(ParseDecimal("nan"));
  EXPECT_FALSE(ParseDecimal("inf"));
  EXPECT_FALSE(ParseDecimal("0x10"));
  EXPECT_FALSE(ParseDecimal(""));
  EXPECT_FALSE(ParseDecimal("1e999"));
}

TEST(FormatNumber, RoundTripsExactly) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = dist(gen);
    EXPECT_EQ(*ParseDecimal(FormatNumber(v)), v);
  }
}

TEST(LoadDataset, DropsRowsMissingProtectedValue) {
  TempDir dir;
  const auto path = dir / "d.csv";
  std::ofstream(path) << "Race,Diagnosis\nA,yes\n,no\nB,no\nA,yes\n";
  const Dataset d = LoadDataset(path, BasicMetadata());
  EXPECT_EQ(d.row_count(), 3u);
  EXPECT_EQ(d.ingest().dropped_rows, 1u);
}

TEST(LoadDataset, ImputesNumericMedian) {
  const Metadata md = BasicMetadata();
  RawTable raw{{"Race", "x", "Diagnosis"}, {{"A", "1", "yes"}, {"B", "", "no"}, {"A", "3", "no"}}};
  const Dataset d = DatasetFromRaw(raw, md, LoadOptions{.expected_schema = TableSchema{
                                                           {{"Race", ColumnKind::kCategorical},
                                                            {"x", ColumnKind::kNumeric},
                                                            {"Diagnosis", ColumnKind::kCategorical}}}});
  EXPECT_EQ(d.column("x").values, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(d.ingest().imputed_cells.at("x"), 1u);
}

TEST(LoadDataset, ImputesCategoricalModeWithLexicalTieBreak) {
  RawTable raw{{"Race", "site", "Diagnosis"},
               {{"A", "b", "yes"}, {"B", "a", "no"}, {"A", "", "no"}}};
  const Dataset d = DatasetFromRaw(raw, BasicMetadata());
  EXPECT_EQ(d.column("site").Label(2), "a");
}

TEST(LoadDataset, LabelWithThreeValues) {
  RawTable raw{{"Race", "Diagnosis"}, {{"A", "yes"}, {"B", "no"}, {"A", "maybe"}}};
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, BasicMetadata()); }), ErrorCode::kLabelNotBinary);
}

TEST(LoadDataset, LabelWithOneValue) {
  RawTable raw{{"Race", "Diagnosis"}, {{"A", "yes"}, {"B", "yes"}}};
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, BasicMetadata()); }), ErrorCode::kLabelNotBinary);
}

TEST(LoadDataset, MissingColumns) {
  RawTable raw{{"Sex", "Diagnosis"}, {{"A", "yes"}, {"B", "no"}}};
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, BasicMetadata()); }), ErrorCode::kMetadataMismatch);
  Metadata md = BasicMetadata();
  md.protected_attributes.clear();
  md.label_column = "Outcome";
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, md); }), ErrorCode::kMetadataMismatch);
}

TEST(LoadDataset, PositiveLabelAbsent) {
  Metadata md = BasicMetadata();
  md.positive_label = "maybe";
  RawTable raw{{"Race", "Diagnosis"}, {{"A", "yes"}, {"B", "no"}}};
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, md); }), ErrorCode::kMetadataMismatch);
}

TEST(LoadDataset, NumericProtectedAttributeRejected) {
  Metadata md = BasicMetadata();
  md.declared_kinds["Race"] = ColumnKind::kNumeric;
  RawTable raw{{"Race", "Diagnosis"}, {{"1", "yes"}, {"2", "no"}}};
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, md); }), ErrorCode::kMetadataMismatch);
}

TEST(LoadDataset, BadNumericCellReportsRecord) {
  Metadata md = BasicMetadata();
  md.declared_kinds["x"] = ColumnKind::kNumeric;
  RawTable raw{{"Race", "x", "Diagnosis"}, {{"A", "1", "yes"}, {"B", "oops", "no"}}};
  try {
    DatasetFromRaw(raw, md);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
  }
}

TEST(LoadDataset, ExpectedSchemaNamesMustMatch) {
  LoadOptions opts;
  opts.expected_schema = TableSchema{{{"Race", ColumnKind::kCategorical},
                                      {"Diagnosis", ColumnKind::kCategorical}}};
  RawTable raw{{"Ethnicity", "Diagnosis"}, {{"A", "yes"}, {"B", "no"}}};
  EXPECT_EQ(CodeOf([&] { DatasetFromRaw(raw, BasicMetadata(), opts); }),
            ErrorCode::kSchemaMismatch);
}

TEST(LoadDataset, MissingFileIsIoError) {
  EXPECT_EQ(CodeOf([] { LoadDataset("/nonexistent/file.csv", BasicMetadata()); }),
            ErrorCode::kIoError);
}

TEST(Metadata, JsonRoundTrip) {
  Metadata md = BasicMetadata();
  md.protected_attributes.push_back("Sex");
  md.declared_kinds["Age"] = ColumnKind::kNumeric;
  const Metadata back = ParseMetadataJson(MetadataToJson(md));
  EXPECT_EQ(back.label_column, md.label_column);
  EXPECT_EQ(back.positive_label, md.positive_label);
  EXPECT_EQ(back.protected_attributes, md.protected_attributes);
  EXPECT_EQ(back.declared_kinds, md.declared_kinds);
}

TEST(Metadata, MalformedJson) {
  EXPECT_EQ(CodeOf([] { ParseMetadataJson("{"); }), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseMetadataJson("{\"protected\": []}"); }),
            ErrorCode::kMetadataMismatch);
  EXPECT_EQ(CodeOf([] {
              ParseMetadataJson(
                  R"({"label":{"column":"y","positive":"1"},"columns":{"a":{"kind":"text"}}})");
            }),
            ErrorCode::kMetadataMismatch);
}

TEST(Dataset, ConstructorValidates) {
  TableSchema schema{{{"x", ColumnKind::kNumeric}}};
  EXPECT_EQ(CodeOf([&] { Dataset(schema, {NumCol({1.0, std::nan("")})}); }),
            ErrorCode::kInvalidArgument);
  Column bad = CatCol({"a"});
  bad.codes[0] = 3;
  EXPECT_ANY_THROW(Dataset(TableSchema{{{"c", ColumnKind::kCategorical}}}, {bad}));
  EXPECT_ANY_THROW(MakeTable({{"a", NumCol({1, 2})}, {"b", NumCol({1})}}));
}

TEST(Dataset, CsvRoundTripIsIdentity) {
  TempDir dir;
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  std::vector<double> xs;
  std::vector<std::string> race, dx;
  for (int i = 0; i < 200; ++i) {
    xs.push_back(normal(gen) * 1e3);
    race.push_back(i % 3 == 0 ? "A, with comma" : (i % 3 == 1 ? "B \"q\"" : "C"));
    dx.push_back(i % 2 ? "yes" : "no");
  }
  const Dataset d =
      MakeTable({{"Race", CatCol(race)}, {"x", NumCol(xs)}, {"Diagnosis", CatCol(dx)}});
  WriteCsv(d, dir / "d.csv");
  Metadata md = BasicMetadata();
  LoadOptions opts;
  opts.expected_schema = d.schema();
  const Dataset back = DatasetFromRaw(ReadCsvFile(dir / "d.csv"), md, opts);
  EXPECT_TRUE(back == d);
  EXPECT_EQ(ToCsv(back), ToCsv(d));
}

Dataset Numbered(std::size_t n) {
  std::vector<double> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(static_cast<double>(i));
  return MakeTable({{"id", NumCol(ids)}});
}

TEST(SplitHoldout, PartitionArithmetic) {
  const Split s = SplitHoldout(Numbered(10), SplitSpec{7, 0.3, 1});
  EXPECT_EQ(s.train.row_count(), 7u);
  EXPECT_EQ(s.holdout.row_count(), 3u);
  std::set<std::size_t> all(s.train_indices.begin(), s.train_indices.end());
  for (auto i : s.holdout_indices) EXPECT_TRUE(all.insert(i).second);
  EXPECT_EQ(all.size(), 10u);
}

TEST(SplitHoldout, Deterministic) {
  const Dataset d = Numbered(100);
  const Split a = SplitHoldout(d, SplitSpec{50, 0.3, 9});
  const Split b = SplitHoldout(d, SplitSpec{50, 0.3, 9});
  const Split c = SplitHoldout(d, SplitSpec{50, 0.3, 10});
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.holdout_indices, b.holdout_indices);
  EXPECT_NE(a.holdout_indices, c.holdout_indices);
}

TEST(SplitHoldout, InsufficientRows) {
  EXPECT_EQ(CodeOf([] { SplitHoldout(Numbered(1000), SplitSpec{1000, 0.3, 0}); }),
            ErrorCode::kInsufficientRows);
  EXPECT_NO_THROW(SplitHoldout(Numbered(1000), SplitSpec{700, 0.3, 0}));
  EXPECT_EQ(CodeOf([] { SplitHoldout(Numbered(1000), SplitSpec{701, 0.3, 0}); }),
            ErrorCode::kInsufficientRows);
}

TEST(SplitHoldout, InvalidSpec) {
  EXPECT_EQ(CodeOf([] { SplitHoldout(Numbered(10), SplitSpec{5, 0.0, 0}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { SplitHoldout(Numbered(10), SplitSpec{5, 1.0, 0}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { SplitHoldout(Numbered(10), SplitSpec{0, 0.3, 0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(HoldoutCount, CeilOfFraction) {
  EXPECT_EQ(HoldoutCount(10, 0.3), 3u);
  EXPECT_EQ(HoldoutCount(11, 0.3), 4u);
  EXPECT_EQ(HoldoutCount(2000, 0.3), 600u);
}

TEST(SplitHoldout, PartitionProperty) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + gen() % 200;
    const double f = 0.05 + 0.9 * std::uniform_real_distribution<double>()(gen);
    const std::size_t h = HoldoutCount(n, f);
    if (h >= n) continue;
    const std::size_t train = 1 + gen() % (n - h);
    const Split s = SplitHoldout(Numbered(n), SplitSpec{train, f, gen()});
    ASSERT_EQ(s.train.row_count(), train);
    ASSERT_EQ(s.holdout.row_count(), h);
    std::set<double> tr(s.train.column(0).values.begin(), s.train.column(0).values.end());
    for (double v : s.holdout.column(0).values) ASSERT_FALSE(tr.count(v));
  }
}

TEST(ValidateMetadata, Cases) {
  const Dataset d = MakeTable({{"Race", CatCol({"A", "B"})}, {"Diagnosis", CatCol({"yes", "no"})},
                               {"x", NumCol({1, 2})}});
  EXPECT_TRUE(ValidateMetadata(d.schema(), BasicMetadata(), d).empty());

  Metadata missing = BasicMetadata();
  missing.label_column = "Outcome";
  auto v = ValidateMetadata(d.schema(), missing, d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Violation{Violation::Kind::kMissingColumn, "Outcome"}));
  EXPECT_EQ(Describe(v[0]), "MissingColumn(\"Outcome\")");

  Metadata self = BasicMetadata();
  self.protected_attributes = {"Diagnosis"};
  v = ValidateMetadata(d.schema(), self, d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::kProtectedIsLabel);

  Metadata numeric = BasicMetadata();
  numeric.protected_attributes = {"x"};
  numeric.positive_label = "maybe";
  v = ValidateMetadata(d.schema(), numeric, d);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, Violation::Kind::kPositiveLabelAbsent);
  EXPECT_EQ(v[1].kind, Violation::Kind::kProtectedNotCategorical);
}

}  // namespace
}  // namespace fairsynth
