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

#include "errscope/scheduler.hpp"

#include <algorithm>

#include "errscope/hash.hpp"

namespace errscope {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string part(const std::string& s) {
  if (s.empty()) return "none";
  std::string out = s;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

std::string header() {
  return std::string(kCacheMagic) + "\n" + std::to_string(kCacheVersion) + "\n";
}

}  // namespace

std::string TaskKey::file_stem() const {
  return part(module) + "-" + part(split) + "-" + part(pipeline_id);
}

std::string TaskKey::describe() const {
  return module + "[" + split + (pipeline_id.empty() ? "" : "/" + pipeline_id) + "@" +
         hex64(config_hash) + "]";
}

bool AnalysisScheduler::contains(const TaskKey& key) const {
  std::lock_guard lock(mutex_);
  return slots_.contains(key);
}

void AnalysisScheduler::clear_memory() {
  std::lock_guard lock(mutex_);
  for (auto it = slots_.begin(); it != slots_.end();) {
    if (it->second.future.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
      it = slots_.erase(it);
    } else {
      ++it;
    }
  }
}

std::optional<fs::path> AnalysisScheduler::blob_path(const TaskKey& key) const {
  if (!disk_root_) return std::nullopt;
  return *disk_root_ / hex64(key.config_hash) / (key.file_stem() + ".bin");
}

std::string AnalysisScheduler::encode_blob(const json& value) {
  const auto cbor = json::to_cbor(value);
  std::string out = header();
  out.append(reinterpret_cast<const char*>(cbor.data()), cbor.size());
  return out;
}

std::optional<json> AnalysisScheduler::decode_blob(const std::string& bytes) {
  const std::string expected = header();
  if (bytes.compare(0, expected.size(), expected) != 0) return std::nullopt;
  try {
    return json::from_cbor(bytes.begin() + static_cast<std::ptrdiff_t>(expected.size()),
                           bytes.end());
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::optional<json> AnalysisScheduler::read_blob(const TaskKey& key) {
  auto path = blob_path(key);
  if (!path) return std::nullopt;
  std::ifstream in(*path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  auto decoded = decode_blob(buf.str());
  if (!decoded) discard_blob(key);
  return decoded;
}

void AnalysisScheduler::discard_blob(const TaskKey& key) {
  if (auto path = blob_path(key)) {
    std::error_code ec;
    fs::remove(*path, ec);
  }
}

void AnalysisScheduler::store(const TaskKey& key, const json& value) {
  auto path = blob_path(key);
  if (!path) return;
  // The disk tier is an optimization; failing to write it is not an error.
  std::error_code ec;
  fs::create_directories(path->parent_path(), ec);
  if (ec) return;
  const fs::path tmp = path->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out << encode_blob(value);
    if (!out) return;
  }
  fs::rename(tmp, *path, ec);
}

std::exception_ptr AnalysisScheduler::wrap_failure(const TaskKey& key, std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kComputationFailed) return error;
    return std::make_exception_ptr(
        Error(ErrorCode::kComputationFailed, key.module + ": " + e.what(), e.root_code()));
  } catch (const std::exception& e) {
    return std::make_exception_ptr(
        Error(ErrorCode::kComputationFailed, key.module + ": " + e.what()));
  } catch (...) {
    return std::make_exception_ptr(
        Error(ErrorCode::kComputationFailed, key.module + ": unknown failure"));
  }
}

std::string_view task_status_name(TaskStatus status) {
  switch (status) {
    case TaskStatus::kPending: return "pending";
    case TaskStatus::kRunning: return "running";
    case TaskStatus::kDone: return "done";
    case TaskStatus::kFailed: return "failed";
  }
  return "";
}

void ProgressBoard::add(const std::string& name) {
  std::lock_guard lock(mutex_);
  auto it = std::find_if(tasks_.begin(), tasks_.end(),
                         [&](const TaskProgress& t) { return t.name == name; });
  if (it == tasks_.end()) {
    tasks_.push_back({name, TaskStatus::kPending, {}});
  } else {
    *it = {name, TaskStatus::kPending, {}};
  }
}

void ProgressBoard::set(const std::string& name, TaskStatus status, std::string error) {
  std::lock_guard lock(mutex_);
  for (auto& t : tasks_) {
    if (t.name == name) {
      t.status = status;
      t.error = std::move(error);
      return;
    }
  }
  tasks_.push_back({name, status, std::move(error)});
}

std::vector<TaskProgress> ProgressBoard::snapshot() const {
  std::lock_guard lock(mutex_);
  return tasks_;
}

std::map<TaskStatus, int> ProgressBoard::counts() const {
  std::lock_guard lock(mutex_);
  std::map<TaskStatus, int> out{{TaskStatus::kPending, 0},
                                {TaskStatus::kRunning, 0},
                                {TaskStatus::kDone, 0},
                                {TaskStatus::kFailed, 0}};
  for (const auto& t : tasks_) ++out[t.status];
  return out;
}

bool ProgressBoard::finished() const {
  std::lock_guard lock(mutex_);
  return std::all_of(tasks_.begin(), tasks_.end(), [](const TaskProgress& t) {
    return t.status == TaskStatus::kDone || t.status == TaskStatus::kFailed;
  });
}

}  // namespace errscope
