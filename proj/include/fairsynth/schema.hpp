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

// Table ingestion: CSV parsing, column-kind inference, metadata validation
// and seeded train/holdout splitting.

#ifndef FAIRSYNTH_SCHEMA_HPP_
#define FAIRSYNTH_SCHEMA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairsynth {

enum class ColumnKind { kNumeric, kCategorical };

std::string_view ToString(ColumnKind kind);

// A parseable-as-numeric column with at most this many distinct values is
// treated as categorical (coded scales, 0/1 flags).
inline constexpr std::size_t kCategoricalCardinalityCutoff = 20;

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;

  bool operator==(const ColumnSpec&) const = default;
};

struct TableSchema {
  std::vector<ColumnSpec> columns;

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  bool operator==(const TableSchema&) const = default;
};

struct Metadata {
  std::string label_column;
  std::string positive_label;
  std::vector<std::string> protected_attributes;
  std::map<std::string, ColumnKind> declared_kinds;
};

// Parses the metadata JSON document:
//   {"label": {"column": ..., "positive": ...}, "protected": [...],
//    "columns": {name: {"kind": "numeric"|"categorical"}}}
Metadata ParseMetadataJson(std::string_view text);
Metadata LoadMetadata(const std::filesystem::path& path);
std::string MetadataToJson(const Metadata& metadata);

// Header plus string cells, as read from an RFC-4180 file. An empty cell is a
// missing value.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable ParseCsv(std::string_view text);
RawTable ReadCsvFile(const std::filesystem::path& path);

// Strict decimal parse: optional sign, digits, '.', exponent. Rejects
// inf/nan/hex and anything non-finite.
std::optional<double> ParseDecimal(std::string_view text);

// Shortest round-trip representation.
std::string FormatNumber(double value);

TableSchema InferSchema(const RawTable& raw,
                        const std::map<std::string, ColumnKind>& declared = {},
                        std::size_t cutoff = kCategoricalCardinalityCutoff);

// Column-major storage. Numeric columns use `values`; categorical columns
// use `codes` indexing into `categories`.
struct Column {
  ColumnKind kind = ColumnKind::kCategorical;
  std::vector<double> values;
  std::vector<std::int32_t> codes;
  std::vector<std::string> categories;

  std::size_t size() const {
    return kind == ColumnKind::kNumeric ? values.size() : codes.size();
  }
  const std::string& Label(std::size_t row) const {
    return categories[static_cast<std::size_t>(codes[row])];
  }
  // Code of `label` in this column's table, if present.
  std::optional<std::int32_t> CodeOf(std::string_view label) const;
};

struct IngestStats {
  std::size_t dropped_rows = 0;
  std::map<std::string, std::size_t> imputed_cells;
};

class Dataset {
 public:
  Dataset() = default;
  // Validates that column kinds match the schema, lengths agree, numeric
  // cells are finite and codes are in range.
  Dataset(TableSchema schema, std::vector<Column> columns,
          IngestStats ingest = {});

  const TableSchema& schema() const { return schema_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }
  const Column& column(std::size_t index) const { return columns_[index]; }
  const Column& column(std::string_view name) const;
  const std::vector<Column>& columns() const { return columns_; }
  const IngestStats& ingest() const { return ingest_; }

  // Rows in the given order (duplicates allowed). Code tables are kept.
  Dataset SelectRows(std::span<const std::size_t> rows) const;

  // Cell-for-cell equality: same schema, same numeric bits, same category
  // labels. Code-table order and ingest stats are ignored.
  bool operator==(const Dataset& other) const;

 private:
  TableSchema schema_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
  IngestStats ingest_;
};

struct LoadOptions {
  // Forces column kinds and requires identical column names and order.
  std::optional<TableSchema> expected_schema;
  // Synthetic tables may legitimately contain a single label value.
  bool require_binary_label = true;
};

Dataset DatasetFromRaw(const RawTable& raw, const Metadata& metadata,
                       const LoadOptions& options = {});
Dataset LoadDataset(const std::filesystem::path& csv_path,
                    const Metadata& metadata, const LoadOptions& options = {});

std::string ToCsv(const Dataset& data);
void WriteCsv(const Dataset& data, const std::filesystem::path& path);

struct SplitSpec {
  std::size_t train_rows = 1000;
  double holdout_fraction = 0.3;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset holdout;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> holdout_indices;
};

std::size_t HoldoutCount(std::size_t row_count, double holdout_fraction);

Split SplitHoldout(const Dataset& data, const SplitSpec& spec);

struct Violation {
  enum class Kind {
    kMissingColumn,
    kLabelNotCategorical,
    kLabelNotBinary,
    kPositiveLabelAbsent,
    kProtectedNotCategorical,
    kProtectedIsLabel,
  };
  Kind kind;
  std::string column;

  bool operator==(const Violation&) const = default;
};

std::string Describe(const Violation& violation);

std::vector<Violation> ValidateMetadata(const TableSchema& schema,
                                        const Metadata& metadata,
                                        const Dataset& data);

}  // namespace fairsynth

#endif  // FAIRSYNTH_SCHEMA_HPP_
