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

#include "errscope/action_store.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "errscope/error.hpp"
#include "json.hpp"

namespace errscope {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kActionNames[kActionValueCount] = {
    "no_action", "relabel", "remove", "augment_with_similar",
    "define_new_class", "merge_classes", "investigate"};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() %
      1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof(out), "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

std::string csv_field(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json to_record(const ProposedAction& a) {
  return {{"split", a.split},
          {"id", a.id},
          {"proposed_action", action_name(a.value)},
          {"updated_at", a.updated_at}};
}

}  // namespace

std::string_view action_name(ActionValue value) {
  return kActionNames[static_cast<std::size_t>(value)];
}

std::optional<ActionValue> parse_action(std::string_view name) {
  for (int i = 0; i < kActionValueCount; ++i) {
    if (kActionNames[i] == name) return static_cast<ActionValue>(i);
  }
  return std::nullopt;
}

ActionStore::ActionStore(fs::path path) : path_(std::move(path)) {
  std::unique_lock lock(mutex_);
  replay();
  compact_locked();
}

void ActionStore::replay() {
  entries_.clear();
  log_lines_ = 0;
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json r;
    try {
      r = json::parse(line);
    } catch (const json::parse_error&) {
      // A torn final line from an interrupted write is dropped.
      if (in.peek() == EOF) break;
      throw Error(ErrorCode::kMalformedRow,
                  path_.string() + ":" + std::to_string(line_no) + ": invalid record");
    }
    ProposedAction a;
    a.split = r.value("split", "");
    a.id = r.value("id", std::int64_t{-1});
    auto value = parse_action(r.value("proposed_action", ""));
    if (a.split.empty() || a.id < 0 || !value) {
      throw Error(ErrorCode::kMalformedRow,
                  path_.string() + ":" + std::to_string(line_no) + ": invalid record");
    }
    a.value = *value;
    a.updated_at = r.value("updated_at", "");
    ++log_lines_;
    auto key = std::make_pair(a.split, a.id);
    if (a.value == ActionValue::kNoAction) {
      entries_.erase(key);
    } else {
      entries_[key] = std::move(a);
    }
  }
}

void ActionStore::compact_locked() {
  if (log_lines_ == entries_.size()) return;
  if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path());
  const fs::path tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    for (const auto& [_, a] : entries_) out << to_record(a).dump() << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path_);
  log_lines_ = entries_.size();
}

void ActionStore::append(const ProposedAction& action) {
  if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path_.string());
  out << to_record(action).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path_.string());
  ++log_lines_;
}

ProposedAction ActionStore::set(const Split& split, std::int64_t id, ActionValue value) {
  split.at(id);
  ProposedAction action{split.name, id, value, utc_now()};
  std::unique_lock lock(mutex_);
  append(action);
  auto key = std::make_pair(split.name, id);
  if (value == ActionValue::kNoAction) {
    entries_.erase(key);
  } else {
    entries_[key] = action;
  }
  if (log_lines_ > 2 * entries_.size() + 64) compact_locked();
  return action;
}

ProposedAction ActionStore::set(const Split& split, std::int64_t id, std::string_view value) {
  auto parsed = parse_action(value);
  if (!parsed) {
    throw Error(ErrorCode::kUnknownAction, "unknown proposed action '" + std::string(value) + "'");
  }
  return set(split, id, *parsed);
}

ActionValue ActionStore::get(std::string_view split, std::int64_t id) const {
  auto found = find(split, id);
  return found ? found->value : ActionValue::kNoAction;
}

std::optional<ProposedAction> ActionStore::find(std::string_view split, std::int64_t id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find({std::string(split), id});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<ActionValue> ActionStore::values_for(const Split& split) const {
  std::vector<ActionValue> out(split.size(), ActionValue::kNoAction);
  std::shared_lock lock(mutex_);
  auto it = entries_.lower_bound({split.name, std::int64_t{0}});
  for (; it != entries_.end() && it->first.first == split.name; ++it) {
    if (split.contains(it->first.second)) {
      out[static_cast<std::size_t>(it->first.second)] = it->second.value;
    }
  }
  return out;
}

std::vector<ProposedAction> ActionStore::entries() const {
  std::shared_lock lock(mutex_);
  std::vector<ProposedAction> out;
  out.reserve(entries_.size());
  for (const auto& [_, a] : entries_) out.push_back(a);
  return out;
}

void ActionStore::clear() {
  std::unique_lock lock(mutex_);
  entries_.clear();
  log_lines_ = 1;  // forces the rewrite below
  compact_locked();
}

std::string proposed_actions_csv(const ActionStore& store, const ProjectState& state,
                                 std::size_t* rows) {
  std::string out = "split,id,text,label,proposed_action\n";
  std::size_t count = 0;
  for (const auto& a : store.entries()) {
    const Split& split = state.split(a.split);
    const Utterance& u = split.at(a.id);
    out += csv_field(a.split) + ',' + csv_field(std::to_string(a.id)) + ',' + csv_field(u.text) +
           ',' + csv_field(state.config.class_name(u.label)) + ',' +
           csv_field(action_name(a.value)) + '\n';
    ++count;
  }
  if (rows != nullptr) *rows = count;
  return out;
}

std::size_t export_proposed_actions(const ActionStore& store, const ProjectState& state,
                                    const fs::path& path) {
  std::size_t rows = 0;
  const std::string csv = proposed_actions_csv(store, state, &rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << csv;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
  return rows;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      field.clear();
      record.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kMalformedRow, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

std::size_t import_proposed_actions(ActionStore& store, const ProjectState& state,
                                    const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto records = parse_csv(buf.str());
  if (records.empty() || records.front() != std::vector<std::string>{
                                               "split", "id", "text", "label",
                                               "proposed_action"}) {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": unexpected header");
  }
  std::size_t applied = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 5) {
      throw Error(ErrorCode::kMalformedRow,
                  path.string() + ": record " + std::to_string(r) + " has " +
                      std::to_string(rec.size()) + " fields");
    }
    std::int64_t id = 0;
    try {
      id = std::stoll(rec[1]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedRow,
                  path.string() + ": record " + std::to_string(r) + " has a bad id");
    }
    store.set(state.split(rec[0]), id, rec[4]);
    ++applied;
  }
  return applied;
}

}  // namespace errscope
