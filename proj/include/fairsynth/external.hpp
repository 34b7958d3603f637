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

#ifndef FAIRSYNTH_EXTERNAL_HPP_
#define FAIRSYNTH_EXTERNAL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fairsynth/copula.hpp"
#include "fairsynth/schema.hpp"

namespace fairsynth {

// {"name": ..., "command": [...], "timeout_seconds": ...}
ExternalBackend ParseBackendDescriptor(std::string_view json_text);
// A JSON list of descriptors.
std::vector<ExternalBackend> LoadBackendsFile(const std::filesystem::path& path);

struct ExternalInvocation {
  std::filesystem::path train_csv;
  std::filesystem::path metadata_json;
  std::filesystem::path out_csv;
  std::size_t rows = 0;
  int epochs = 1;
  std::uint64_t seed = 0;
};

std::vector<std::string> ExpandCommand(const ExternalBackend& backend,
                                       const ExternalInvocation& invocation);

struct ProcessResult {
  int exit_code = 0;
  std::string stderr_text;
};

// Runs argv[0] (PATH lookup) with stdout discarded and stderr captured.
// Throws Error(kTimeout) after `timeout_seconds`, killing the child.
ProcessResult RunProcess(const std::vector<std::string>& argv, int timeout_seconds);

// Spawns the backend and loads its output against `metadata`, forcing the
// training schema's column kinds. Throws BackendFailed, SchemaMismatch or
// Timeout.
Dataset RunExternalBackend(const ExternalBackend& backend,
                           const ExternalInvocation& invocation,
                           const Metadata& metadata,
                           const TableSchema& expected_schema);

}  // namespace fairsynth

#endif  // FAIRSYNTH_EXTERNAL_HPP_
