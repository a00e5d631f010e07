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

#ifndef ERRSCOPE_QUERY_HPP_
#define ERRSCOPE_QUERY_HPP_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errscope/action_store.hpp"
#include "errscope/prediction.hpp"
#include "errscope/smart_tags.hpp"

namespace errscope {

// Subpopulation selector. Facets combine with AND; values within a facet
// with OR. Smart tags OR within a family and AND across families. Empty
// facets do not constrain.
struct FilterSpec {
  std::set<ClassIndex> labels;
  std::set<ClassIndex> predictions;
  std::set<Outcome> outcomes;
  TagSet smart_tags;
  std::set<ActionValue> data_actions;
  double confidence_min = 0.0;
  double confidence_max = 1.0;
  std::string text_contains;
  std::string pipeline_id;
  bool postprocessed = true;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

// Throws InvalidRange for a confidence range outside [0, 1] or inverted.
void validate(const FilterSpec& spec);

enum class SortField { kId, kTopConfidence, kLabel, kPrediction };
enum class SortDirection { kAscending, kDescending };

std::string_view sort_field_name(SortField field);
std::optional<SortField> parse_sort_field(std::string_view name);

struct SortSpec {
  SortField field = SortField::kId;
  SortDirection direction = SortDirection::kAscending;

  friend bool operator==(const SortSpec&, const SortSpec&) = default;
};

struct PageSpec {
  std::int64_t offset = 0;
  std::int64_t limit = 100;  // <= 0 means no limit

  friend bool operator==(const PageSpec&, const PageSpec&) = default;
};

// Per-utterance columns of one (split, pipeline) pair, precomputed so a
// query is a single linear scan.
struct QueryRow {
  std::int64_t id = 0;
  ClassIndex label = 0;
  std::string folded_text;
  ClassIndex raw_prediction = 0;
  ClassIndex post_prediction = 0;
  Outcome raw_outcome = Outcome::kCorrectAndPredicted;
  Outcome post_outcome = Outcome::kCorrectAndPredicted;
  double top_confidence = 0.0;
  TagSet tags;
};

struct QueryTable {
  std::vector<QueryRow> rows;
  // Declared class names by index, used for label/prediction sorting.
  std::vector<std::string> class_names;
};

QueryTable build_query_table(const Split& split, const PredictionSet& predictions,
                             std::span<const TagSet> tags,
                             const std::vector<std::string>& class_names);

struct FilterResult {
  std::int64_t total_count = 0;
  std::vector<std::int64_t> ids;  // the requested page, sorted
};

// `actions` aligns with the table rows.
FilterResult filter_utterances(const QueryTable& table, std::span<const ActionValue> actions,
                               const FilterSpec& spec, const SortSpec& sort = {},
                               const PageSpec& page = {0, 0});

// Every matching id in ascending id order (no sort, no paging); used to feed
// population-based metrics.
std::vector<std::int64_t> matching_ids(const QueryTable& table,
                                       std::span<const ActionValue> actions,
                                       const FilterSpec& spec);

}  // namespace errscope

#endif  // ERRSCOPE_QUERY_HPP_
