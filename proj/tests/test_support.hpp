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


// Shared fixtures for the test binaries.

#ifndef FAIRSYNTH_TESTS_TEST_SUPPORT_HPP_
#define FAIRSYNTH_TESTS_TEST_SUPPORT_HPP_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fairsynth/schema.hpp"

namespace fairsynth::testing {

inline Column NumCol(std::vector<double> values) {
  Column c;
  c.kind = ColumnKind::kNumeric;
  c.values = std::move(values);
  return c;
}

// Codes follow first appearance.
inline Column CatCol(const std::vector<std::string>& labels) {
  Column c;
  c.kind = ColumnKind::kCategorical;
  for (const auto& l : labels) {
    auto code = c.CodeOf(l);
    if (!code) {
      c.categories.push_back(l);
      code = static_cast<std::int32_t>(c.categories.size() - 1);
    }
    c.codes.push_back(*code);
  }
  return c;
}

inline Dataset MakeTable(std::vector<std::pair<std::string, Column>> named) {
  TableSchema schema;
  std::vector<Column> cols;
  for (auto& [name, col] : named) {
    schema.columns.push_back({name, col.kind});
    cols.push_back(std::move(col));
  }
  return Dataset(std::move(schema), std::move(cols));
}

inline std::vector<std::string> Labels(const Column& c) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < c.size(); ++r) out.push_back(c.Label(r));
  return out;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fairsynth-test-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fairsynth::testing

#endif  // FAIRSYNTH_TESTS_TEST_SUPPORT_HPP_
