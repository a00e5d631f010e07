// Copyright 2026 The errscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "errscope/error.hpp"

namespace errscope {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kInvalidThreshold: return "InvalidThreshold";
    case ErrorCode::kUnknownSplitName: return "UnknownSplitName";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kRowCountMismatch: return "RowCountMismatch";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kEmptyVector: return "EmptyVector";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kMissingEmbeddings: return "MissingEmbeddings";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kMissingSaliency: return "MissingSaliency";
    case ErrorCode::kMissingPredictions: return "MissingPredictions";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kMissingPerturbedPrediction: return "MissingPerturbedPrediction";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kUnknownTagName: return "UnknownTagName";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kUnknownUtterance: return "UnknownUtterance";
    case ErrorCode::kUnknownAction: return "UnknownAction";
    case ErrorCode::kUnknownSplit: return "UnknownSplit";
    case ErrorCode::kUnknownPipeline: return "UnknownPipeline";
    case ErrorCode::kBadRequest: return "BadRequest";
    case ErrorCode::kComputationFailed: return "ComputationFailed";
    case ErrorCode::kBindFailure: return "BindFailure";
  }
  return "Unknown";
}

}  // namespace errscope
