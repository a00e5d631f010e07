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

#ifndef ERRSCOPE_PROVIDERS_HPP_
#define ERRSCOPE_PROVIDERS_HPP_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errscope/behavioral.hpp"

namespace errscope {

// Reads perturbed predictions from a line-record file keyed by
// (id, test_name). The file is parsed on first use.
class FileBackedProvider : public PredictionProvider {
 public:
  FileBackedProvider(std::filesystem::path path, int class_count);

  std::vector<Eigen::VectorXd> predict(std::span<const PredictionRequest> batch) override;
  std::vector<PerturbedVariant> extra_variants(const Split& split) override;

 private:
  void ensure_loaded();

  std::filesystem::path path_;
  int class_count_;
  std::once_flag loaded_;
  std::map<std::pair<std::int64_t, std::string>, Eigen::VectorXd> rows_;
  std::vector<PerturbedPredictionRow> custom_;
};

// Posts text batches to an HTTP endpoint. Request body: one {"text": ...}
// record per line; response: one {"probs": [...]} record per line.
class RemoteProvider : public PredictionProvider {
 public:
  RemoteProvider(std::string url, int class_count);

  std::vector<Eigen::VectorXd> predict(std::span<const PredictionRequest> batch) override;

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;
  int class_count_;
};

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url);

std::string encode_provider_request(std::span<const PredictionRequest> batch);
std::vector<Eigen::VectorXd> decode_provider_response(const std::string& body,
                                                      int class_count);

}  // namespace errscope

#endif  // ERRSCOPE_PROVIDERS_HPP_
