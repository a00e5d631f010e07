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

#ifndef ERRSCOPE_ERROR_HPP_
#define ERRSCOPE_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace errscope {

enum class ErrorCode {
  // configuration and ingestion
  kMissingField,
  kInvalidThreshold,
  kUnknownSplitName,
  kInvalidConfig,
  kIoError,
  kRowCountMismatch,
  kMalformedRow,
  // numerical preconditions
  kEmptyVector,
  kEmptyInput,
  kTooFewSamples,
  // artifacts
  kMissingEmbeddings,
  kZeroVector,
  kMissingSaliency,
  kMissingPredictions,
  // behavioral providers
  kProviderUnavailable,
  kMissingPerturbedPrediction,
  // query and annotation
  kInvalidRange,
  kUnknownTagName,
  kUnknownClass,
  kUnknownUtterance,
  kUnknownAction,
  kUnknownSplit,
  kUnknownPipeline,
  kBadRequest,
  // scheduling and serving
  kComputationFailed,
  kBindFailure,
};

std::string_view error_code_name(ErrorCode code);

// Every engine failure is reported through this type. `cause` is set when
// an error is re-raised by a layer that wraps it (the scheduler does this),
// so callers can still dispatch on the original condition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, const std::string& message, ErrorCode cause)
      : std::runtime_error(message), code_(code), cause_(cause) {}

  ErrorCode code() const { return code_; }
  std::optional<ErrorCode> cause() const { return cause_; }
  // The innermost known condition.
  ErrorCode root_code() const { return cause_.value_or(code_); }

 private:
  ErrorCode code_;
  std::optional<ErrorCode> cause_;
};

}  // namespace errscope

#endif  // ERRSCOPE_ERROR_HPP_
