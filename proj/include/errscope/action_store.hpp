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

#ifndef ERRSCOPE_ACTION_STORE_HPP_
#define ERRSCOPE_ACTION_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errscope/ingestion.hpp"

namespace errscope {

enum class ActionValue : std::uint8_t {
  kNoAction,
  kRelabel,
  kRemove,
  kAugmentWithSimilar,
  kDefineNewClass,
  kMergeClasses,
  kInvestigate,
};
inline constexpr int kActionValueCount = 7;

std::string_view action_name(ActionValue value);
std::optional<ActionValue> parse_action(std::string_view name);

struct ProposedAction {
  std::string split;
  std::int64_t id = 0;
  ActionValue value = ActionValue::kNoAction;
  std::string updated_at;  // ISO-8601 UTC

  friend bool operator==(const ProposedAction&, const ProposedAction&) = default;
};

// Proposed actions persisted as an append-only line log, replayed and
// compacted on open. Writers are serialized; readers see the last committed
// value. Setting no_action erases the entry.
class ActionStore {
 public:
  explicit ActionStore(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  // Validates `id` against `split` before writing.
  ProposedAction set(const Split& split, std::int64_t id, ActionValue value);
  ProposedAction set(const Split& split, std::int64_t id, std::string_view value);
  ActionValue get(std::string_view split, std::int64_t id) const;
  std::optional<ProposedAction> find(std::string_view split, std::int64_t id) const;
  // Values for every utterance of the split, no_action where unset.
  std::vector<ActionValue> values_for(const Split& split) const;
  // Non-default entries ordered by (split, id).
  std::vector<ProposedAction> entries() const;
  void clear();

 private:
  void replay();
  void append(const ProposedAction& action);
  void compact_locked();

  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::string, std::int64_t>, ProposedAction> entries_;
  std::size_t log_lines_ = 0;
};

// Comma-delimited, every field quoted, header
// split,id,text,label,proposed_action. Returns the number of data rows.
std::size_t export_proposed_actions(const ActionStore& store, const ProjectState& state,
                                    const std::filesystem::path& path);
std::string proposed_actions_csv(const ActionStore& store, const ProjectState& state,
                                 std::size_t* rows = nullptr);
// Reads an export back into the store; returns rows applied.
std::size_t import_proposed_actions(ActionStore& store, const ProjectState& state,
                                    const std::filesystem::path& path);

// RFC 4180 style record parsing, exposed for tests.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace errscope

#endif  // ERRSCOPE_ACTION_STORE_HPP_
