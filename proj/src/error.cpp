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

#include "fairsynth/error.hpp"

namespace fairsynth {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kDuplicateColumnName: return "DuplicateColumnName";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMetadataMismatch: return "MetadataMismatch";
    case ErrorCode::kLabelNotBinary: return "LabelNotBinary";
    case ErrorCode::kInsufficientRows: return "InsufficientRows";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kTooFewValues: return "TooFewValues";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kNotFitted: return "NotFitted";
    case ErrorCode::kBackendFailed: return "BackendFailed";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kEmptyColumn: return "EmptyColumn";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kQualityOutOfRange: return "QualityOutOfRange";
    case ErrorCode::kAllIterationsFailed: return "AllIterationsFailed";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

bool IsValidationError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTable:
    case ErrorCode::kDuplicateColumnName:
    case ErrorCode::kParseError:
    case ErrorCode::kMetadataMismatch:
    case ErrorCode::kLabelNotBinary:
    case ErrorCode::kInsufficientRows:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kQualityOutOfRange:
      return true;
    default:
      return false;
  }
}

}  // namespace fairsynth
