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

#ifndef FAIRSYNTH_CLI_HPP_
#define FAIRSYNTH_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "fairsynth/copula.hpp"
#include "fairsynth/supervisor.hpp"

namespace fairsynth {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kSeedEnvVar = "MEMISIS_SEED";
inline constexpr const char* kModelFile = "copula_model.json";
inline constexpr const char* kBenchTableFile = "bench.txt";
inline constexpr const char* kBenchJsonFile = "bench.json";

// Native backend names followed by the external descriptors' names.
std::vector<std::string> ValidBackendNames(const std::vector<ExternalBackend>& externals);

// Fills backend / external of `config` from a name; InvalidArgument listing
// the valid names otherwise.
void ResolveBackend(const std::string& name, const std::vector<ExternalBackend>& externals,
                    RunConfig& config);

// `args` excludes the program name.
int CliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairsynth

#endif  // FAIRSYNTH_CLI_HPP_
