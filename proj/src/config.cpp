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

#include "errscope/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "errscope/error.hpp"
#include "errscope/hash.hpp"

namespace errscope {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void missing(const std::string& field) {
  throw Error(ErrorCode::kMissingField, "missing required field: " + field);
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, field + ": " + why);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) missing(path + key);
  return *it;
}

template <typename T>
T read_as(const json& value, const std::string& field) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    invalid(field, "unexpected type");
  }
}

double read_fraction(const json& obj, const std::string& key,
                     const std::string& field, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  const double v = read_as<double>(*it, field);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidThreshold,
                field + " must be in [0, 1], got " + it->dump());
  }
  return v;
}

double read_non_negative(const json& obj, const std::string& key,
                         const std::string& field, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  const double v = read_as<double>(*it, field);
  if (!(v >= 0.0)) {
    throw Error(ErrorCode::kInvalidThreshold,
                field + " must be non-negative, got " + it->dump());
  }
  return v;
}

int read_count(const json& obj, const std::string& key,
               const std::string& field, int fallback, int minimum) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) invalid(field, "expected an integer");
  const auto v = it->get<std::int64_t>();
  if (v < minimum || v > 1'000'000) {
    throw Error(ErrorCode::kInvalidThreshold,
                field + " must be >= " + std::to_string(minimum) + ", got " +
                    it->dump());
  }
  return static_cast<int>(v);
}

std::map<std::string, fs::path> read_path_map(const json& obj,
                                              const std::string& key,
                                              const std::string& field) {
  std::map<std::string, fs::path> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_object()) invalid(field, "expected an object of split -> path");
  for (const auto& [split, path] : it->items()) {
    out.emplace(split, read_as<std::string>(path, field + "." + split));
  }
  return out;
}

void check_split_names(const std::map<std::string, fs::path>& paths,
                       const std::map<std::string, fs::path>& splits,
                       const std::string& field) {
  for (const auto& [split, _] : paths) {
    if (!splits.contains(split)) {
      throw Error(ErrorCode::kUnknownSplitName,
                  field + "." + split + ": no split named '" + split + "'");
    }
  }
}

Thresholds parse_thresholds(const json& t) {
  Thresholds d;
  const std::string p = "thresholds.";
  Thresholds r;
  r.min_per_class = read_count(t, "min_per_class", p + "min_per_class",
                               d.min_per_class, 0);
  r.proportion_delta = read_fraction(t, "proportion_delta",
                                     p + "proportion_delta", d.proportion_delta);
  r.mean_delta_tokens = read_non_negative(
      t, "mean_delta_tokens", p + "mean_delta_tokens", d.mean_delta_tokens);
  r.std_delta_tokens = read_non_negative(
      t, "std_delta_tokens", p + "std_delta_tokens", d.std_delta_tokens);
  r.long_sentence_tokens =
      read_count(t, "long_sentence_tokens", p + "long_sentence_tokens",
                 d.long_sentence_tokens, 0);
  r.short_sentence_tokens =
      read_count(t, "short_sentence_tokens", p + "short_sentence_tokens",
                 d.short_sentence_tokens, 0);
  if (r.short_sentence_tokens > r.long_sentence_tokens + 1) {
    throw Error(ErrorCode::kInvalidThreshold,
                p + "short_sentence_tokens must not exceed "
                    "long_sentence_tokens + 1");
  }
  r.no_close_similarity =
      read_fraction(t, "no_close_similarity", p + "no_close_similarity",
                    d.no_close_similarity);
  r.neighbor_count =
      read_count(t, "neighbor_count", p + "neighbor_count", d.neighbor_count, 1);
  r.same_label_fraction =
      read_fraction(t, "same_label_fraction", p + "same_label_fraction",
                    d.same_label_fraction);
  r.typo_variants =
      read_count(t, "typo_variants", p + "typo_variants", d.typo_variants, 0);
  r.max_confidence_delta =
      read_fraction(t, "max_confidence_delta", p + "max_confidence_delta",
                    d.max_confidence_delta);
  r.epistemic_threshold =
      read_non_negative(t, "epistemic_threshold", p + "epistemic_threshold",
                        d.epistemic_threshold);
  r.ece_bins = read_count(t, "ece_bins", p + "ece_bins", d.ece_bins, 1);
  return r;
}

json path_map_to_json(const std::map<std::string, fs::path>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v.generic_string();
  return out;
}

}  // namespace

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> kWords = {
      "a",     "an",    "and",   "are",  "as",    "at",   "be",    "but",
      "by",    "can",   "do",    "does", "for",   "from", "had",   "has",
      "have",  "i",     "if",    "in",   "is",    "it",   "its",   "me",
      "my",    "of",    "on",    "or",   "so",    "that", "the",   "their",
      "them",  "then",  "there", "they", "this",  "to",   "was",   "we",
      "were",  "what",  "when",  "which", "who",  "will", "with",  "you",
      "your"};
  return kWords;
}

std::optional<ClassIndex> ProjectConfig::class_index(
    std::string_view name) const {
  if (name == rejection_class) return rejection_index();
  for (int i = 0; i < class_count(); ++i) {
    if (classes[i] == name) return i;
  }
  return std::nullopt;
}

const std::string& ProjectConfig::class_name(ClassIndex index) const {
  if (index == rejection_index()) return rejection_class;
  return classes.at(static_cast<std::size_t>(index));
}

const PipelineSource& ProjectConfig::pipeline(std::string_view id) const {
  for (const auto& p : pipelines) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::kUnknownPipeline,
              "unknown pipeline '" + std::string(id) + "'");
}

bool ProjectConfig::has_pipeline(std::string_view id) const {
  return std::any_of(pipelines.begin(), pipelines.end(),
                     [&](const auto& p) { return p.id == id; });
}

fs::path ProjectConfig::resolve(const fs::path& p) const {
  if (p.is_absolute() || project_dir.empty()) return p;
  return project_dir / p;
}

ProjectConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) invalid("<root>", "expected an object");
  ProjectConfig cfg;
  cfg.project_name =
      read_as<std::string>(require(doc, "project_name", ""), "project_name");

  const json& classes = require(doc, "classes", "");
  if (!classes.is_array() || classes.empty()) {
    invalid("classes", "expected a non-empty array of class names");
  }
  cfg.classes = read_as<std::vector<std::string>>(classes, "classes");
  cfg.rejection_class = read_as<std::string>(
      require(doc, "rejection_class", ""), "rejection_class");
  {
    std::set<std::string> seen;
    for (const auto& c : cfg.classes) {
      if (!seen.insert(c).second) invalid("classes", "duplicate class " + c);
    }
    if (seen.contains(cfg.rejection_class)) {
      invalid("rejection_class",
              "must not also be a model output class (it carries no "
              "probability entry)");
    }
  }

  const json& splits = require(doc, "splits", "");
  if (!splits.is_object()) invalid("splits", "expected an object");
  cfg.splits = read_path_map(doc, "splits", "splits");
  if (!cfg.splits.contains("train")) missing("splits.train");
  if (!cfg.splits.contains("eval")) missing("splits.eval");

  cfg.embeddings = read_path_map(doc, "embeddings", "embeddings");
  check_split_names(cfg.embeddings, cfg.splits, "embeddings");
  cfg.syntax = read_path_map(doc, "syntax", "syntax");
  check_split_names(cfg.syntax, cfg.splits, "syntax");

  const json& pipelines = require(doc, "pipelines", "");
  if (!pipelines.is_array() || pipelines.empty()) {
    missing("pipelines[0]");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < pipelines.size(); ++i) {
    const std::string at = "pipelines[" + std::to_string(i) + "].";
    const json& pj = pipelines[i];
    if (!pj.is_object()) invalid(at, "expected an object");
    PipelineSource p;
    p.id = read_as<std::string>(require(pj, "id", at), at + "id");
    if (!ids.insert(p.id).second) invalid(at + "id", "duplicate pipeline id");
    p.prediction_threshold = read_fraction(
        pj, "prediction_threshold", at + "prediction_threshold", 0.5);
    p.predictions = read_path_map(pj, "predictions", at + "predictions");
    if (p.predictions.empty()) missing(at + "predictions");
    check_split_names(p.predictions, cfg.splits, at + "predictions");
    p.saliency = read_path_map(pj, "saliency", at + "saliency");
    check_split_names(p.saliency, cfg.splits, at + "saliency");
    p.mc_samples = read_path_map(pj, "mc_samples", at + "mc_samples");
    check_split_names(p.mc_samples, cfg.splits, at + "mc_samples");
    p.perturbed_predictions =
        read_path_map(pj, "perturbed_predictions", at + "perturbed_predictions");
    check_split_names(p.perturbed_predictions, cfg.splits,
                      at + "perturbed_predictions");
    if (auto it = pj.find("provider_url"); it != pj.end() && !it->is_null()) {
      p.provider_url = read_as<std::string>(*it, at + "provider_url");
    }
    cfg.pipelines.push_back(std::move(p));
  }

  if (auto it = doc.find("thresholds"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) invalid("thresholds", "expected an object");
    cfg.thresholds = parse_thresholds(*it);
  }

  if (auto it = doc.find("stopwords"); it != doc.end() && !it->is_null()) {
    cfg.stopwords = read_as<std::vector<std::string>>(*it, "stopwords");
  } else {
    cfg.stopwords = default_stopwords();
  }

  if (auto it = doc.find("seed"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() &&
                                       it->get<std::int64_t>() >= 0)) {
      invalid("seed", "expected a non-negative 64-bit integer");
    }
    cfg.seed = it->get<std::uint64_t>();
  }

  cfg.project_dir = base_dir;
  if (auto it = doc.find("project_dir"); it != doc.end() && !it->is_null()) {
    cfg.project_dir =
        cfg.resolve(read_as<std::string>(*it, "project_dir"));
  }
  cfg.hash = compute_config_hash(cfg);
  return cfg;
}

ProjectConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                "cannot open config file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig,
                path.string() + ": parse error: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const ProjectConfig& c) {
  const Thresholds& t = c.thresholds;
  json pipelines = json::array();
  for (const auto& p : c.pipelines) {
    pipelines.push_back({
        {"id", p.id},
        {"prediction_threshold", p.prediction_threshold},
        {"predictions", path_map_to_json(p.predictions)},
        {"saliency", path_map_to_json(p.saliency)},
        {"mc_samples", path_map_to_json(p.mc_samples)},
        {"perturbed_predictions", path_map_to_json(p.perturbed_predictions)},
        {"provider_url", p.provider_url},
    });
  }
  return {
      {"project_name", c.project_name},
      {"classes", c.classes},
      {"rejection_class", c.rejection_class},
      {"splits", path_map_to_json(c.splits)},
      {"embeddings", path_map_to_json(c.embeddings)},
      {"syntax", path_map_to_json(c.syntax)},
      {"pipelines", pipelines},
      {"thresholds",
       {
           {"min_per_class", t.min_per_class},
           {"proportion_delta", t.proportion_delta},
           {"mean_delta_tokens", t.mean_delta_tokens},
           {"std_delta_tokens", t.std_delta_tokens},
           {"long_sentence_tokens", t.long_sentence_tokens},
           {"short_sentence_tokens", t.short_sentence_tokens},
           {"no_close_similarity", t.no_close_similarity},
           {"neighbor_count", t.neighbor_count},
           {"same_label_fraction", t.same_label_fraction},
           {"typo_variants", t.typo_variants},
           {"max_confidence_delta", t.max_confidence_delta},
           {"epistemic_threshold", t.epistemic_threshold},
           {"ece_bins", t.ece_bins},
       }},
      {"stopwords", c.stopwords},
      {"seed", c.seed},
  };
}

std::uint64_t compute_config_hash(const ProjectConfig& config) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return Fnv1a64().update(config_to_json(config).dump()).digest();
}

}  // namespace errscope
