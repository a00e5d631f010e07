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

#include "errscope/providers.hpp"

#include <sstream>

#include "errscope/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace errscope {

using nlohmann::json;

FileBackedProvider::FileBackedProvider(std::filesystem::path path, int class_count)
    : path_(std::move(path)), class_count_(class_count) {}

void FileBackedProvider::ensure_loaded() {
  std::call_once(loaded_, [this] {
    for (auto& row : read_perturbed_predictions(path_, class_count_)) {
      auto key = std::make_pair(row.id, row.test_name);
      if (row.family) custom_.push_back(row);
      rows_.emplace(std::move(key), std::move(row.probs));
    }
  });
}

std::vector<Eigen::VectorXd> FileBackedProvider::predict(
    std::span<const PredictionRequest> batch) {
  ensure_loaded();
  std::vector<Eigen::VectorXd> out;
  out.reserve(batch.size());
  for (const auto& req : batch) {
    auto it = rows_.find({req.id, std::string(req.test_name)});
    if (it == rows_.end()) {
      throw Error(ErrorCode::kMissingPerturbedPrediction,
                  path_.string() + ": no prediction for (id=" + std::to_string(req.id) +
                      ", test_name=" + std::string(req.test_name) + ")");
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<PerturbedVariant> FileBackedProvider::extra_variants(const Split& split) {
  ensure_loaded();
  std::vector<PerturbedVariant> out;
  for (const auto& row : custom_) {
    auto family = parse_perturbation_family(*row.family);
    if (!family) {
      throw Error(ErrorCode::kMalformedRow,
                  path_.string() + ": unknown family '" + *row.family + "' for test " +
                      row.test_name);
    }
    if (!split.contains(row.id)) {
      throw Error(ErrorCode::kUnknownUtterance,
                  path_.string() + ": id " + std::to_string(row.id) + " not in split '" +
                      split.name + "'");
    }
    out.push_back({split.name, row.id, *family, row.test_name,
                   row.perturbed_text.value_or(std::string())});
  }
  return out;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string encode_provider_request(std::span<const PredictionRequest> batch) {
  std::string body;
  for (const auto& req : batch) {
    body += json{{"text", req.text}}.dump();
    body += '\n';
  }
  return body;
}

std::vector<Eigen::VectorXd> decode_provider_response(const std::string& body,
                                                      int class_count) {
  std::vector<Eigen::VectorXd> out;
  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kProviderUnavailable,
                  std::string("provider response is not line-delimited JSON: ") + e.what());
    }
    auto probs = record.find("probs");
    if (probs == record.end() || !probs->is_array() ||
        static_cast<int>(probs->size()) != class_count) {
      throw Error(ErrorCode::kProviderUnavailable,
                  "provider response record lacks a probs array of length " +
                      std::to_string(class_count));
    }
    Eigen::VectorXd v(class_count);
    for (int c = 0; c < class_count; ++c) v(c) = (*probs)[c].get<double>();
    out.push_back(std::move(v));
  }
  return out;
}

RemoteProvider::RemoteProvider(std::string url, int class_count)
    : class_count_(class_count) {
  std::tie(base_, path_) = split_url(url);
}

std::vector<Eigen::VectorXd> RemoteProvider::predict(std::span<const PredictionRequest> batch) {
  if (batch.empty()) return {};
  auto describe = [&] {
    return "(id=" + std::to_string(batch.front().id) +
           ", test_name=" + std::string(batch.front().test_name) + ")";
  };
  httplib::Client client(base_);
  client.set_connection_timeout(5);
  client.set_read_timeout(60);
  auto res = client.Post(path_, encode_provider_request(batch), "application/x-ndjson");
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                "provider " + base_ + path_ + " unreachable (" + httplib::to_string(res.error()) +
                    ") for " + describe());
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderUnavailable,
                "provider " + base_ + path_ + " answered HTTP " + std::to_string(res->status) +
                    " for " + describe());
  }
  auto out = decode_provider_response(res->body, class_count_);
  if (out.size() != batch.size()) {
    throw Error(ErrorCode::kProviderUnavailable,
                "provider returned " + std::to_string(out.size()) + " rows for " +
                    std::to_string(batch.size()) + " texts starting at " + describe());
  }
  return out;
}

}  // namespace errscope
