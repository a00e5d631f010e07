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

#include "errscope/query.hpp"

#include <algorithm>
#include <array>

#include "errscope/error.hpp"
#include "errscope/saliency.hpp"

namespace errscope {

namespace {

struct CompiledFilter {
  const FilterSpec& spec;
  // Selected tags grouped by family; empty groups are skipped.
  std::array<TagSet, kTagFamilyCount> tag_groups{};
  std::string needle;

  explicit CompiledFilter(const FilterSpec& s) : spec(s), needle(fold_case(s.text_contains)) {
    for (SmartTag t : s.smart_tags.tags()) {
      tag_groups[static_cast<std::size_t>(tag_family(t))].insert(t);
    }
  }

  bool matches(const QueryRow& row, ActionValue action) const {
    const ClassIndex prediction = spec.postprocessed ? row.post_prediction : row.raw_prediction;
    const Outcome outcome = spec.postprocessed ? row.post_outcome : row.raw_outcome;
    if (!spec.labels.empty() && !spec.labels.contains(row.label)) return false;
    if (!spec.predictions.empty() && !spec.predictions.contains(prediction)) return false;
    if (!spec.outcomes.empty() && !spec.outcomes.contains(outcome)) return false;
    if (!spec.data_actions.empty() && !spec.data_actions.contains(action)) return false;
    if (row.top_confidence < spec.confidence_min || row.top_confidence > spec.confidence_max) {
      return false;
    }
    for (const TagSet& group : tag_groups) {
      if (!group.empty() && !row.tags.intersects(group)) return false;
    }
    if (!needle.empty() && row.folded_text.find(needle) == std::string::npos) return false;
    return true;
  }
};

std::vector<std::int64_t> scan(const QueryTable& table, std::span<const ActionValue> actions,
                               const FilterSpec& spec) {
  validate(spec);
  if (actions.size() != table.rows.size()) {
    throw Error(ErrorCode::kBadRequest, "action column does not match the query table");
  }
  const CompiledFilter filter(spec);
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (filter.matches(table.rows[i], actions[i])) ids.push_back(table.rows[i].id);
  }
  return ids;
}

}  // namespace

void validate(const FilterSpec& spec) {
  if (!(spec.confidence_min >= 0.0 && spec.confidence_max <= 1.0 &&
        spec.confidence_min <= spec.confidence_max)) {
    throw Error(ErrorCode::kInvalidRange,
                "confidence range must satisfy 0 <= min <= max <= 1");
  }
}

std::string_view sort_field_name(SortField field) {
  switch (field) {
    case SortField::kId: return "id";
    case SortField::kTopConfidence: return "top_confidence";
    case SortField::kLabel: return "label";
    case SortField::kPrediction: return "prediction";
  }
  return "";
}

std::optional<SortField> parse_sort_field(std::string_view name) {
  for (auto f : {SortField::kId, SortField::kTopConfidence, SortField::kLabel,
                 SortField::kPrediction}) {
    if (sort_field_name(f) == name) return f;
  }
  return std::nullopt;
}

QueryTable build_query_table(const Split& split, const PredictionSet& predictions,
                             std::span<const TagSet> tags,
                             const std::vector<std::string>& class_names) {
  if (predictions.size() != split.size() || tags.size() != split.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "query table columns do not match the split");
  }
  QueryTable table;
  table.class_names = class_names;
  table.rows.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    const Utterance& u = split.utterances[i];
    QueryRow row;
    row.id = u.id;
    row.label = u.label;
    row.folded_text = fold_case(u.text);
    row.raw_prediction = predictions.raw.predictions[i].top_class;
    row.post_prediction = predictions.post.predictions[i].top_class;
    row.raw_outcome = predictions.raw.outcomes[i];
    row.post_outcome = predictions.post.outcomes[i];
    row.top_confidence = predictions.raw.predictions[i].top_confidence;
    row.tags = tags[i];
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::int64_t> matching_ids(const QueryTable& table,
                                       std::span<const ActionValue> actions,
                                       const FilterSpec& spec) {
  return scan(table, actions, spec);
}

FilterResult filter_utterances(const QueryTable& table, std::span<const ActionValue> actions,
                               const FilterSpec& spec, const SortSpec& sort,
                               const PageSpec& page) {
  if (page.offset < 0) throw Error(ErrorCode::kInvalidRange, "page offset must be >= 0");
  std::vector<std::int64_t> ids = scan(table, actions, spec);
  // Rows are stored by id, so ids index the table directly.
  auto compare_keys = [&](std::int64_t a, std::int64_t b) -> int {
    const QueryRow& ra = table.rows[static_cast<std::size_t>(a)];
    const QueryRow& rb = table.rows[static_cast<std::size_t>(b)];
    switch (sort.field) {
      case SortField::kId:
        return 0;
      case SortField::kTopConfidence:
        return ra.top_confidence < rb.top_confidence ? -1
               : rb.top_confidence < ra.top_confidence ? 1 : 0;
      case SortField::kLabel:
        return table.class_names[ra.label].compare(table.class_names[rb.label]);
      case SortField::kPrediction: {
        const ClassIndex pa = spec.postprocessed ? ra.post_prediction : ra.raw_prediction;
        const ClassIndex pb = spec.postprocessed ? rb.post_prediction : rb.raw_prediction;
        return table.class_names[pa].compare(table.class_names[pb]);
      }
    }
    return 0;
  };
  const bool descending = sort.direction == SortDirection::kDescending;
  std::stable_sort(ids.begin(), ids.end(), [&](std::int64_t a, std::int64_t b) {
    const int c = compare_keys(a, b);
    if (c != 0) return descending ? c > 0 : c < 0;
    if (sort.field == SortField::kId) return descending ? a > b : a < b;
    return a < b;
  });
  FilterResult result;
  result.total_count = static_cast<std::int64_t>(ids.size());
  const auto begin = std::min<std::size_t>(static_cast<std::size_t>(page.offset), ids.size());
  const auto end = page.limit <= 0
                       ? ids.size()
                       : std::min(ids.size(), begin + static_cast<std::size_t>(page.limit));
  result.ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                    ids.begin() + static_cast<std::ptrdiff_t>(end));
  return result;
}

}  // namespace errscope
