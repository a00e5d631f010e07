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

#ifndef ERRSCOPE_SCHEDULER_HPP_
#define ERRSCOPE_SCHEDULER_HPP_

#include <atomic>
#include <compare>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <typeindex>
#include <vector>

#include "errscope/error.hpp"
#include "json.hpp"

namespace errscope {

struct TaskKey {
  std::string module;
  std::string split;
  std::string pipeline_id;  // empty when the module is pipeline-independent
  std::uint64_t config_hash = 0;

  friend auto operator<=>(const TaskKey&, const TaskKey&) = default;
  // "<module>-<split>-<pipeline>"; "none" stands in for empty parts.
  std::string file_stem() const;
  std::string describe() const;
};

inline constexpr std::string_view kCacheMagic = "errscope-cache";
inline constexpr int kCacheVersion = 1;

// Lazily computes and memoizes results by TaskKey. Concurrent callers with
// the same key share one in-flight computation. Successful results are kept
// in memory for the process lifetime and, when a disk root is set, written
// to <root>/<config_hash>/<file_stem>.bin. Failures are never cached.
class AnalysisScheduler {
 public:
  explicit AnalysisScheduler(std::optional<std::filesystem::path> disk_root = std::nullopt)
      : disk_root_(std::move(disk_root)) {}

  AnalysisScheduler(const AnalysisScheduler&) = delete;
  AnalysisScheduler& operator=(const AnalysisScheduler&) = delete;

  // T must be convertible to and from nlohmann::json.
  template <typename T>
  std::shared_ptr<const T> get_or_compute(const TaskKey& key, const std::function<T()>& compute) {
    return run<T, true>(key, compute);
  }

  // Same single-flight memoization without the disk tier.
  template <typename T>
  std::shared_ptr<const T> get_or_compute_in_memory(const TaskKey& key,
                                                    const std::function<T()>& compute) {
    return run<T, false>(key, compute);
  }

  bool contains(const TaskKey& key) const;

  // Number of times a compute function actually ran.
  std::int64_t computations() const { return computations_.load(); }
  std::int64_t disk_hits() const { return disk_hits_.load(); }
  // Drops the in-memory tier; in-flight computations are unaffected.
  void clear_memory();

  std::optional<std::filesystem::path> blob_path(const TaskKey& key) const;

  // Blob encoding: magic line, version line, then CBOR.
  static std::string encode_blob(const nlohmann::json& value);
  // nullopt on magic/version mismatch or undecodable payload.
  static std::optional<nlohmann::json> decode_blob(const std::string& bytes);

 private:
  using Value = std::shared_ptr<const void>;
  struct Slot {
    std::shared_future<Value> future;
    std::type_index type;
  };

  template <typename T, bool Persist>
  std::shared_ptr<const T> run(const TaskKey& key, const std::function<T()>& compute) {
    std::promise<Value> promise;
    std::shared_future<Value> future;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = slots_.find(key);
      if (it != slots_.end()) {
        if (it->second.type != std::type_index(typeid(T))) {
          throw Error(ErrorCode::kComputationFailed,
                      key.describe() + ": cached under a different result type");
        }
        future = it->second.future;
      } else {
        future = promise.get_future().share();
        slots_.emplace(key, Slot{future, std::type_index(typeid(T))});
        owner = true;
      }
    }
    if (!owner) return std::static_pointer_cast<const T>(future.get());

    try {
      std::shared_ptr<const T> value;
      if constexpr (Persist) value = load<T>(key);
      if (!value) {
        ++computations_;
        value = std::make_shared<const T>(compute());
        if constexpr (Persist) store(key, nlohmann::json(*value));
      }
      promise.set_value(value);
      return value;
    } catch (...) {
      auto failure = wrap_failure(key, std::current_exception());
      {
        std::lock_guard lock(mutex_);
        slots_.erase(key);
      }
      promise.set_exception(failure);
      std::rethrow_exception(failure);
    }
  }

  template <typename T>
  std::shared_ptr<const T> load(const TaskKey& key) {
    auto json = read_blob(key);
    if (!json) return nullptr;
    try {
      auto value = std::make_shared<const T>(json->template get<T>());
      ++disk_hits_;
      return value;
    } catch (const std::exception&) {
      discard_blob(key);
      return nullptr;
    }
  }

  std::optional<nlohmann::json> read_blob(const TaskKey& key);
  void discard_blob(const TaskKey& key);
  void store(const TaskKey& key, const nlohmann::json& value);
  static std::exception_ptr wrap_failure(const TaskKey& key, std::exception_ptr error);

  std::optional<std::filesystem::path> disk_root_;
  mutable std::mutex mutex_;
  std::map<TaskKey, Slot> slots_;
  std::atomic<std::int64_t> computations_{0};
  std::atomic<std::int64_t> disk_hits_{0};
};

enum class TaskStatus { kPending, kRunning, kDone, kFailed };
std::string_view task_status_name(TaskStatus status);

struct TaskProgress {
  std::string name;
  TaskStatus status = TaskStatus::kPending;
  std::string error;
};

// Thread-safe task status board for warm-up.
class ProgressBoard {
 public:
  void add(const std::string& name);
  void set(const std::string& name, TaskStatus status, std::string error = {});
  std::vector<TaskProgress> snapshot() const;
  std::map<TaskStatus, int> counts() const;
  bool finished() const;

 private:
  mutable std::mutex mutex_;
  std::vector<TaskProgress> tasks_;
};

}  // namespace errscope

#endif  // ERRSCOPE_SCHEDULER_HPP_
