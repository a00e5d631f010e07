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

#ifndef ERRSCOPE_WARNINGS_HPP_
#define ERRSCOPE_WARNINGS_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errscope/config.hpp"
#include "errscope/ingestion.hpp"

namespace errscope {

enum class WarningKind { kClassTooSmall, kClassProportionShift, kMissingClass, kLengthMismatch };
enum class Severity { kInfo, kWarning };

std::string_view warning_kind_name(WarningKind kind);
std::string_view severity_name(Severity severity);

struct Warning {
  WarningKind kind = WarningKind::kClassTooSmall;
  Severity severity = Severity::kWarning;
  // Split the warning is about; for MissingClass, the split lacking the class.
  std::string split;
  std::optional<ClassIndex> class_index;
  // Fixed keys per kind:
  //   ClassTooSmall        count, min_per_class
  //   ClassProportionShift p_train, p_eval, delta
  //   MissingClass         count_train, count_eval
  //   LengthMismatch       mean_train, mean_eval, std_train, std_eval,
  //                        mean_delta_tokens, std_delta_tokens
  std::map<std::string, double> evidence;

  friend bool operator==(const Warning&, const Warning&) = default;
};

// ClassTooSmall for every class present in `split` with fewer than
// `min_per_class` examples. Absent classes are MissingClass territory.
std::vector<Warning> class_size_warnings(const Split& split, const Thresholds& thresholds);

std::vector<Warning> split_shift_warnings(const Split& train, const Split& eval,
                                          const Thresholds& thresholds);

// Token counts per utterance, aligned with the split; syntax rows may
// override individual counts.
std::vector<int> split_word_counts(const Split& split, const SyntaxTable* syntax);

std::vector<Warning> length_mismatch_warning(const std::vector<int>& train_counts,
                                             const std::vector<int>& eval_counts,
                                             const Thresholds& thresholds);

// All dataset warnings for the project: class sizes for every split, then
// train/eval shift and length mismatch.
std::vector<Warning> dataset_warnings(const ProjectState& state);

}  // namespace errscope

#endif  // ERRSCOPE_WARNINGS_HPP_
