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

#include "fairsynth/schema.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fairsynth/error.hpp"
#include "fairsynth/rng.hpp"
#include "json.hpp"

namespace fairsynth {

std::string_view ToString(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

std::optional<std::size_t> TableSchema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Metadata

namespace {

ColumnKind ParseKind(const std::string& text) {
  if (text == "numeric") return ColumnKind::kNumeric;
  if (text == "categorical") return ColumnKind::kCategorical;
  throw Error(ErrorCode::kMetadataMismatch, "unknown column kind '" + text + "'");
}

}  // namespace

Metadata ParseMetadataJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("metadata: ") + e.what());
  }
  Metadata md;
  try {
    md.label_column = doc.at("label").at("column").get<std::string>();
    md.positive_label = doc.at("label").at("positive").get<std::string>();
    if (doc.contains("protected")) {
      md.protected_attributes =
          doc.at("protected").get<std::vector<std::string>>();
    }
    if (doc.contains("columns")) {
      for (const auto& [name, spec] : doc.at("columns").items()) {
        md.declared_kinds[name] = ParseKind(spec.at("kind").get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMetadataMismatch,
                std::string("malformed metadata: ") + e.what());
  }
  return md;
}

Metadata LoadMetadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseMetadataJson(buffer.str());
}

std::string MetadataToJson(const Metadata& metadata) {
  nlohmann::ordered_json doc;
  doc["label"]["column"] = metadata.label_column;
  doc["label"]["positive"] = metadata.positive_label;
  doc["protected"] = metadata.protected_attributes;
  if (!metadata.declared_kinds.empty()) {
    for (const auto& [name, kind] : metadata.declared_kinds) {
      doc["columns"][name]["kind"] = std::string(ToString(kind));
    }
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

RawTable ParseCsv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error(ErrorCode::kParseError,
                      "line " + std::to_string(line) +
                          ": unexpected quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        if (record_has_content || !field.empty()) {
          end_record();
        } else {
          record.clear();
          field.clear();
        }
        ++line;
        record_line = line;
        break;
      default:
        if (field_was_quoted) {
          throw Error(ErrorCode::kParseError,
                      "line " + std::to_string(line) +
                          ": characters after closing quote");
        }
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(record_line) + ": unterminated quote");
  }
  if (record_has_content || !field.empty()) end_record();

  if (records.empty()) throw Error(ErrorCode::kEmptyTable, "no header row");
  RawTable raw;
  raw.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != raw.header.size()) {
      throw Error(ErrorCode::kParseError,
                  "record " + std::to_string(r + 1) + ": expected " +
                      std::to_string(raw.header.size()) + " fields, got " +
                      std::to_string(records[r].size()));
    }
    raw.rows.push_back(std::move(records[r]));
  }
  return raw;
}

RawTable ReadCsvFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str());
}

std::optional<double> ParseDecimal(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;
  bool any_digit = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      any_digit = true;
    } else if (c != '+' && c != '-' && c != '.' && c != 'e' && c != 'E') {
      return std::nullopt;
    }
  }
  if (!any_digit) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string FormatNumber(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

std::string EscapeCsv(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void CheckHeader(const std::vector<std::string>& header) {
  if (header.empty()) throw Error(ErrorCode::kEmptyTable, "no columns");
  std::unordered_set<std::string> seen;
  for (const auto& name : header) {
    if (name.empty()) {
      throw Error(ErrorCode::kDuplicateColumnName, "empty column name");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kDuplicateColumnName, "duplicate column '" + name + "'");
    }
  }
}

ColumnKind InferColumnKind(const RawTable& raw, std::size_t col,
                           std::size_t cutoff) {
  std::set<double> distinct;
  for (const auto& row : raw.rows) {
    const std::string& cell = row[col];
    if (cell.empty()) continue;
    const auto parsed = ParseDecimal(cell);
    if (!parsed) return ColumnKind::kCategorical;
    if (distinct.size() <= cutoff) distinct.insert(*parsed);
  }
  return distinct.size() > cutoff ? ColumnKind::kNumeric
                                  : ColumnKind::kCategorical;
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

TableSchema InferSchema(const RawTable& raw,
                        const std::map<std::string, ColumnKind>& declared,
                        std::size_t cutoff) {
  CheckHeader(raw.header);
  if (raw.rows.empty()) throw Error(ErrorCode::kEmptyTable, "no data rows");
  TableSchema schema;
  for (std::size_t c = 0; c < raw.header.size(); ++c) {
    ColumnSpec spec{raw.header[c], InferColumnKind(raw, c, cutoff)};
    if (auto it = declared.find(spec.name); it != declared.end()) {
      spec.kind = it->second;
    }
    schema.columns.push_back(std::move(spec));
  }
  return schema;
}

// ---------------------------------------------------------------------------
// Dataset

std::optional<std::int32_t> Column::CodeOf(std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return static_cast<std::int32_t>(i);
  }
  return std::nullopt;
}

Dataset::Dataset(TableSchema schema, std::vector<Column> columns,
                 IngestStats ingest)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      ingest_(std::move(ingest)) {
  if (columns_.size() != schema_.columns.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "column count does not match schema");
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const Column& col = columns_[c];
    if (col.kind != schema_.columns[c].kind) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "column '" + schema_.columns[c].name + "' kind mismatch");
    }
    if (c == 0) row_count_ = col.size();
    if (col.size() != row_count_) {
      throw Error(ErrorCode::kSchemaMismatch, "ragged columns");
    }
    if (col.kind == ColumnKind::kNumeric) {
      for (double v : col.values) {
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "non-finite value in '" + schema_.columns[c].name + "'");
        }
      }
    } else {
      for (std::int32_t code : col.codes) {
        if (code < 0 || static_cast<std::size_t>(code) >= col.categories.size()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "category code out of range in '" +
                          schema_.columns[c].name + "'");
        }
      }
    }
  }
}

const Column& Dataset::column(std::string_view name) const {
  const auto idx = schema_.IndexOf(name);
  if (!idx) {
    throw Error(ErrorCode::kSchemaMismatch,
                "no column named '" + std::string(name) + "'");
  }
  return columns_[*idx];
}

Dataset Dataset::SelectRows(std::span<const std::size_t> rows) const {
  std::vector<Column> out;
  out.reserve(columns_.size());
  for (const Column& col : columns_) {
    Column sub;
    sub.kind = col.kind;
    sub.categories = col.categories;
    if (col.kind == ColumnKind::kNumeric) {
      sub.values.reserve(rows.size());
      for (std::size_t r : rows) sub.values.push_back(col.values.at(r));
    } else {
      sub.codes.reserve(rows.size());
      for (std::size_t r : rows) sub.codes.push_back(col.codes.at(r));
    }
    out.push_back(std::move(sub));
  }
  return Dataset(schema_, std::move(out));
}

bool Dataset::operator==(const Dataset& other) const {
  if (schema_ != other.schema_ || row_count_ != other.row_count_) return false;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const Column& a = columns_[c];
    const Column& b = other.columns_[c];
    for (std::size_t r = 0; r < row_count_; ++r) {
      if (a.kind == ColumnKind::kNumeric) {
        if (std::bit_cast<std::uint64_t>(a.values[r]) !=
            std::bit_cast<std::uint64_t>(b.values[r])) {
          return false;
        }
      } else if (a.Label(r) != b.Label(r)) {
        return false;
      }
    }
  }
  return true;
}

Dataset DatasetFromRaw(const RawTable& raw, const Metadata& metadata,
                       const LoadOptions& options) {
  CheckHeader(raw.header);
  if (options.expected_schema) {
    std::vector<std::string> expected;
    for (const auto& c : options.expected_schema->columns) expected.push_back(c.name);
    if (expected != raw.header) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "columns differ from the expected schema");
    }
  }
  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < raw.header.size(); ++i) {
      if (raw.header[i] == name) return i;
    }
    throw Error(ErrorCode::kMetadataMismatch, "column '" + name + "' not in table");
  };
  const std::size_t label_idx = index_of(metadata.label_column);
  std::vector<std::size_t> required{label_idx};
  for (const auto& attr : metadata.protected_attributes) {
    if (attr == metadata.label_column) {
      throw Error(ErrorCode::kMetadataMismatch,
                  "protected attribute '" + attr + "' is the label column");
    }
    required.push_back(index_of(attr));
  }
  for (const auto& [name, kind] : metadata.declared_kinds) {
    (void)kind;
    index_of(name);
  }

  RawTable kept;
  kept.header = raw.header;
  IngestStats stats;
  std::vector<std::size_t> source_record;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& row = raw.rows[r];
    const bool missing = std::any_of(required.begin(), required.end(),
                                     [&](std::size_t c) { return row[c].empty(); });
    if (missing) {
      ++stats.dropped_rows;
      continue;
    }
    kept.rows.push_back(row);
    source_record.push_back(r + 2);
  }

  auto declared = metadata.declared_kinds;
  if (options.expected_schema) {
    for (const auto& c : options.expected_schema->columns) declared[c.name] = c.kind;
  }
  TableSchema schema = InferSchema(kept, declared);

  std::vector<Column> columns;
  columns.reserve(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const std::string& name = schema.columns[c].name;
    Column col;
    col.kind = schema.columns[c].kind;
    std::size_t imputed = 0;
    if (col.kind == ColumnKind::kNumeric) {
      std::vector<double> present;
      std::vector<std::size_t> missing_rows;
      col.values.resize(kept.rows.size());
      for (std::size_t r = 0; r < kept.rows.size(); ++r) {
        const std::string& cell = kept.rows[r][c];
        if (cell.empty()) {
          missing_rows.push_back(r);
          continue;
        }
        const auto parsed = ParseDecimal(cell);
        if (!parsed) {
          throw Error(ErrorCode::kParseError,
                      "record " + std::to_string(source_record[r]) +
                          ": column '" + name + "' value '" + cell +
                          "' is not a finite decimal");
        }
        col.values[r] = *parsed;
        present.push_back(*parsed);
      }
      if (!missing_rows.empty()) {
        if (present.empty()) {
          throw Error(ErrorCode::kParseError,
                      "numeric column '" + name + "' has no values");
        }
        const double median = Median(present);
        for (std::size_t r : missing_rows) col.values[r] = median;
        imputed = missing_rows.size();
      }
    } else {
      std::unordered_map<std::string, std::int32_t> lookup;
      std::vector<std::size_t> counts;
      std::vector<std::size_t> missing_rows;
      col.codes.resize(kept.rows.size(), 0);
      for (std::size_t r = 0; r < kept.rows.size(); ++r) {
        const std::string& cell = kept.rows[r][c];
        if (cell.empty()) {
          missing_rows.push_back(r);
          continue;
        }
        auto [it, inserted] =
            lookup.emplace(cell, static_cast<std::int32_t>(col.categories.size()));
        if (inserted) {
          col.categories.push_back(cell);
          counts.push_back(0);
        }
        ++counts[static_cast<std::size_t>(it->second)];
        col.codes[r] = it->second;
      }
      if (!missing_rows.empty()) {
        std::int32_t mode = -1;
        if (col.categories.empty()) {
          col.categories.push_back("");
          mode = 0;
        } else {
          for (std::size_t k = 0; k < counts.size(); ++k) {
            if (mode < 0 || counts[k] > counts[static_cast<std::size_t>(mode)] ||
                (counts[k] == counts[static_cast<std::size_t>(mode)] &&
                 col.categories[k] < col.categories[static_cast<std::size_t>(mode)])) {
              mode = static_cast<std::int32_t>(k);
            }
          }
        }
        for (std::size_t r : missing_rows) col.codes[r] = mode;
        imputed = missing_rows.size();
      }
    }
    if (imputed > 0) stats.imputed_cells[name] = imputed;
    columns.push_back(std::move(col));
  }

  const Column& label = columns[label_idx];
  if (label.kind != ColumnKind::kCategorical) {
    throw Error(ErrorCode::kLabelNotBinary,
                "label column '" + metadata.label_column + "' is not categorical");
  }
  if (label.categories.size() > 2 ||
      (options.require_binary_label && label.categories.size() != 2)) {
    throw Error(ErrorCode::kLabelNotBinary,
                "label column '" + metadata.label_column + "' has " +
                    std::to_string(label.categories.size()) + " distinct values");
  }
  if (options.require_binary_label && !label.CodeOf(metadata.positive_label)) {
    throw Error(ErrorCode::kMetadataMismatch,
                "positive label '" + metadata.positive_label + "' not present");
  }
  for (const auto& attr : metadata.protected_attributes) {
    if (schema.columns[*schema.IndexOf(attr)].kind != ColumnKind::kCategorical) {
      throw Error(ErrorCode::kMetadataMismatch,
                  "protected attribute '" + attr + "' is not categorical");
    }
  }
  return Dataset(std::move(schema), std::move(columns), std::move(stats));
}

Dataset LoadDataset(const std::filesystem::path& csv_path,
                    const Metadata& metadata, const LoadOptions& options) {
  return DatasetFromRaw(ReadCsvFile(csv_path), metadata, options);
}

std::string ToCsv(const Dataset& data) {
  std::string out;
  const auto& cols = data.schema().columns;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out.push_back(',');
    out += EscapeCsv(cols[c].name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out.push_back(',');
      const Column& col = data.column(c);
      if (col.kind == ColumnKind::kNumeric) {
        out += FormatNumber(col.values[r]);
      } else {
        out += EscapeCsv(col.Label(r));
      }
    }
    out.push_back('\n');
  }
  return out;
}

void WriteCsv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << ToCsv(data);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Splitting

std::size_t HoldoutCount(std::size_t row_count, double holdout_fraction) {
  // The epsilon absorbs representation error such as 1000 * 0.3.
  return static_cast<std::size_t>(
      std::ceil(static_cast<double>(row_count) * holdout_fraction - 1e-9));
}

Split SplitHoldout(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "holdout_fraction must be in (0,1)");
  }
  if (spec.train_rows == 0) {
    throw Error(ErrorCode::kInvalidArgument, "train_rows must be positive");
  }
  const std::size_t n = data.row_count();
  const std::size_t holdout = HoldoutCount(n, spec.holdout_fraction);
  const std::size_t available = n - std::min(n, holdout);
  if (spec.train_rows > available) {
    throw Error(ErrorCode::kInsufficientRows,
                "requested " + std::to_string(spec.train_rows) +
                    " training rows but only " + std::to_string(available) +
                    " remain after holding out " + std::to_string(holdout));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.Below(i);
    std::swap(order[i - 1], order[j]);
  }
  Split split;
  split.train_indices.assign(order.begin(),
                             order.begin() + static_cast<std::ptrdiff_t>(spec.train_rows));
  split.holdout_indices.assign(order.end() - static_cast<std::ptrdiff_t>(holdout),
                               order.end());
  split.train = data.SelectRows(split.train_indices);
  split.holdout = data.SelectRows(split.holdout_indices);
  return split;
}

// ---------------------------------------------------------------------------
// Validation

std::string Describe(const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::kMissingColumn:
      return "MissingColumn(\"" + v.column + "\")";
    case Violation::Kind::kLabelNotCategorical:
      return "LabelNotCategorical(\"" + v.column + "\")";
    case Violation::Kind::kLabelNotBinary:
      return "LabelNotBinary(\"" + v.column + "\")";
    case Violation::Kind::kPositiveLabelAbsent:
      return "PositiveLabelAbsent(\"" + v.column + "\")";
    case Violation::Kind::kProtectedNotCategorical:
      return "ProtectedNotCategorical(\"" + v.column + "\")";
    case Violation::Kind::kProtectedIsLabel:
      return "ProtectedIsLabel(\"" + v.column + "\")";
  }
  return "Unknown";
}

std::vector<Violation> ValidateMetadata(const TableSchema& schema,
                                        const Metadata& metadata,
                                        const Dataset& data) {
  using Kind = Violation::Kind;
  std::vector<Violation> out;
  const auto label_idx = schema.IndexOf(metadata.label_column);
  if (!label_idx) {
    out.push_back({Kind::kMissingColumn, metadata.label_column});
  } else if (schema.columns[*label_idx].kind != ColumnKind::kCategorical) {
    out.push_back({Kind::kLabelNotCategorical, metadata.label_column});
  } else if (*label_idx < data.column_count() &&
             data.column(*label_idx).kind == ColumnKind::kCategorical) {
    const Column& col = data.column(*label_idx);
    std::set<std::string> distinct;
    for (std::size_t r = 0; r < data.row_count(); ++r) distinct.insert(col.Label(r));
    if (distinct.size() != 2) {
      out.push_back({Kind::kLabelNotBinary, metadata.label_column});
    }
    if (!distinct.contains(metadata.positive_label)) {
      out.push_back({Kind::kPositiveLabelAbsent, metadata.label_column});
    }
  }
  for (const auto& attr : metadata.protected_attributes) {
    if (attr == metadata.label_column) {
      out.push_back({Kind::kProtectedIsLabel, attr});
      continue;
    }
    const auto idx = schema.IndexOf(attr);
    if (!idx) {
      out.push_back({Kind::kMissingColumn, attr});
    } else if (schema.columns[*idx].kind != ColumnKind::kCategorical) {
      out.push_back({Kind::kProtectedNotCategorical, attr});
    }
  }
  return out;
}

}  // namespace fairsynth
