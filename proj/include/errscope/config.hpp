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

#ifndef ERRSCOPE_CONFIG_HPP_
#define ERRSCOPE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace errscope {

// Index into the declared class list. Indices [0, C) are the model output
// classes in probability-vector order; index C is the rejection class.
using ClassIndex = int;

// Every tunable read by the analysis modules. Defaults are applied for any
// key missing from the config file.
struct Thresholds {
  // dataset warnings
  int min_per_class = 20;
  double proportion_delta = 0.05;
  double mean_delta_tokens = 3.0;
  double std_delta_tokens = 3.0;
  // syntax tags: long iff words > long, short iff words < short
  int long_sentence_tokens = 15;
  int short_sentence_tokens = 3;
  // similarity tags
  double no_close_similarity = 0.5;
  int neighbor_count = 20;
  double same_label_fraction = 0.1;
  // behavioral tests
  int typo_variants = 3;
  double max_confidence_delta = 1.0;
  // uncertainty
  double epistemic_threshold = 0.2;
  // calibration
  int ece_bins = 10;
};

struct PipelineSource {
  std::string id;
  double prediction_threshold = 0.5;
  // split name -> artifact path
  std::map<std::string, std::filesystem::path> predictions;
  std::map<std::string, std::filesystem::path> saliency;
  std::map<std::string, std::filesystem::path> mc_samples;
  std::map<std::string, std::filesystem::path> perturbed_predictions;
  // Remote prediction endpoint used for behavioral tests when no perturbed
  // prediction file is configured for a split. Empty when unused.
  std::string provider_url;
};

struct ProjectConfig {
  std::string project_name;
  std::vector<std::string> classes;
  std::string rejection_class;
  std::map<std::string, std::filesystem::path> splits;
  std::map<std::string, std::filesystem::path> embeddings;
  std::map<std::string, std::filesystem::path> syntax;
  std::vector<PipelineSource> pipelines;
  Thresholds thresholds;
  std::vector<std::string> stopwords;
  std::uint64_t seed = 42;
  // Directory relative paths resolve against; also hosts cache/ and the
  // proposed-action store.
  std::filesystem::path project_dir;
  // Digest of every field above except project_dir.
  std::uint64_t hash = 0;

  int class_count() const { return static_cast<int>(classes.size()); }
  ClassIndex rejection_index() const { return class_count(); }
  int declared_class_count() const { return class_count() + 1; }
  std::optional<ClassIndex> class_index(std::string_view name) const;
  const std::string& class_name(ClassIndex index) const;

  const PipelineSource& pipeline(std::string_view id) const;
  bool has_pipeline(std::string_view id) const;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

const std::vector<std::string>& default_stopwords();

// Parses and validates a config document, filling defaults and computing
// the config hash. Relative artifact paths resolve against `base_dir`.
ProjectConfig parse_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir);
ProjectConfig load_config(const std::filesystem::path& path);

// Resolved config, defaults included. This is also what gets hashed.
nlohmann::json config_to_json(const ProjectConfig& config);

std::uint64_t compute_config_hash(const ProjectConfig& config);

}  // namespace errscope

#endif  // ERRSCOPE_CONFIG_HPP_
