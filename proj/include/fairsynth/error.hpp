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

#ifndef FAIRSYNTH_ERROR_HPP_
#define FAIRSYNTH_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairsynth {

enum class ErrorCode {
  kEmptyTable,
  kDuplicateColumnName,
  kParseError,
  kMetadataMismatch,
  kLabelNotBinary,
  kInsufficientRows,
  kDomainError,
  kTooFewValues,
  kUnknownCategory,
  kNotFitted,
  kBackendFailed,
  kSchemaMismatch,
  kTimeout,
  kEmptyColumn,
  kEmptyDataset,
  kNonFiniteLoss,
  kDimensionMismatch,
  kLengthMismatch,
  kQualityOutOfRange,
  kAllIterationsFailed,
  kInvalidArgument,
  kIoError,
};

std::string_view ToString(ErrorCode code);

// Validation errors are caused by bad user input (CLI exit code 1); the rest
// are runtime failures (exit code 2).
bool IsValidationError(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ToString(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairsynth

#endif  // FAIRSYNTH_ERROR_HPP_
