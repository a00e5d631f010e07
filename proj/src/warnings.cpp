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

#include "errscope/warnings.hpp"

#include <cmath>

#include "errscope/syntax.hpp"

namespace errscope {

namespace {

std::map<ClassIndex, std::int64_t> class_counts(const Split& split) {
  std::map<ClassIndex, std::int64_t> counts;
  for (const auto& u : split.utterances) ++counts[u.label];
  return counts;
}

// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<int>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (int v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (int v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

std::string_view warning_kind_name(WarningKind kind) {
  switch (kind) {
    case WarningKind::kClassTooSmall: return "ClassTooSmall";
    case WarningKind::kClassProportionShift: return "ClassProportionShift";
    case WarningKind::kMissingClass: return "MissingClass";
    case WarningKind::kLengthMismatch: return "LengthMismatch";
  }
  return "";
}

std::string_view severity_name(Severity severity) {
  return severity == Severity::kInfo ? "info" : "warning";
}

std::vector<Warning> class_size_warnings(const Split& split, const Thresholds& thresholds) {
  std::vector<Warning> out;
  for (const auto& [cls, count] : class_counts(split)) {
    if (count < thresholds.min_per_class) {
      out.push_back({WarningKind::kClassTooSmall, Severity::kWarning, split.name, cls,
                     {{"count", static_cast<double>(count)},
                      {"min_per_class", static_cast<double>(thresholds.min_per_class)}}});
    }
  }
  return out;
}

std::vector<Warning> split_shift_warnings(const Split& train, const Split& eval,
                                          const Thresholds& thresholds) {
  std::vector<Warning> out;
  const auto train_counts = class_counts(train);
  const auto eval_counts = class_counts(eval);
  std::map<ClassIndex, std::pair<std::int64_t, std::int64_t>> both;
  for (const auto& [c, n] : train_counts) both[c].first = n;
  for (const auto& [c, n] : eval_counts) both[c].second = n;

  const auto n_train = static_cast<double>(train.size());
  const auto n_eval = static_cast<double>(eval.size());
  for (const auto& [cls, counts] : both) {
    const auto [ct, ce] = counts;
    if (ct == 0 || ce == 0) {
      out.push_back({WarningKind::kMissingClass, Severity::kWarning,
                     ct == 0 ? train.name : eval.name, cls,
                     {{"count_train", static_cast<double>(ct)},
                      {"count_eval", static_cast<double>(ce)}}});
      continue;
    }
    const double p_train = static_cast<double>(ct) / n_train;
    const double p_eval = static_cast<double>(ce) / n_eval;
    if (std::abs(p_train - p_eval) > thresholds.proportion_delta) {
      out.push_back({WarningKind::kClassProportionShift, Severity::kWarning, eval.name, cls,
                     {{"p_train", p_train},
                      {"p_eval", p_eval},
                      {"delta", thresholds.proportion_delta}}});
    }
  }
  return out;
}

std::vector<int> split_word_counts(const Split& split, const SyntaxTable* syntax) {
  std::vector<int> counts;
  counts.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    const SyntaxRow* row = syntax != nullptr ? &syntax->rows[i] : nullptr;
    counts.push_back(effective_word_count(split.utterances[i].text, row));
  }
  return counts;
}

std::vector<Warning> length_mismatch_warning(const std::vector<int>& train_counts,
                                             const std::vector<int>& eval_counts,
                                             const Thresholds& thresholds) {
  const auto [mean_train, std_train] = mean_std(train_counts);
  const auto [mean_eval, std_eval] = mean_std(eval_counts);
  if (std::abs(mean_train - mean_eval) > thresholds.mean_delta_tokens ||
      std::abs(std_train - std_eval) > thresholds.std_delta_tokens) {
    return {{WarningKind::kLengthMismatch, Severity::kWarning, "eval", std::nullopt,
             {{"mean_train", mean_train},
              {"mean_eval", mean_eval},
              {"std_train", std_train},
              {"std_eval", std_eval},
              {"mean_delta_tokens", thresholds.mean_delta_tokens},
              {"std_delta_tokens", thresholds.std_delta_tokens}}}};
  }
  return {};
}

std::vector<Warning> dataset_warnings(const ProjectState& state) {
  const Thresholds& t = state.config.thresholds;
  std::vector<Warning> out;
  for (const auto& [name, split] : state.splits) {
    auto w = class_size_warnings(split, t);
    out.insert(out.end(), w.begin(), w.end());
  }
  const Split& train = state.split("train");
  const Split& eval = state.split("eval");
  auto shift = split_shift_warnings(train, eval, t);
  out.insert(out.end(), shift.begin(), shift.end());
  auto length = length_mismatch_warning(split_word_counts(train, state.syntax_table("train")),
                                        split_word_counts(eval, state.syntax_table("eval")),
                                        t);
  out.insert(out.end(), length.begin(), length.end());
  return out;
}

}  // namespace errscope
