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

#ifndef ERRSCOPE_TESTS_SUPPORT_FIXTURE_HPP_
#define ERRSCOPE_TESTS_SUPPORT_FIXTURE_HPP_

// Helpers that write small on-disk projects for tests.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "errscope/error.hpp"
#include "errscope/ingestion.hpp"
#include "json.hpp"

namespace errscope::testing {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "errscope-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  std::string s;
  for (const auto& r : rows) s += r.dump() + "\n";
  write_file(path, s);
}

inline std::vector<json> prob_rows(const Eigen::MatrixXd& probs) {
  std::vector<json> rows;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    std::vector<double> p(probs.cols());
    for (Eigen::Index c = 0; c < probs.cols(); ++c) p[c] = probs(i, c);
    rows.push_back({{"id", i}, {"probs", p}});
  }
  return rows;
}

struct SplitData {
  std::vector<std::string> texts;
  std::vector<std::string> labels;
};

struct PipelineData {
  std::string id;
  std::optional<double> threshold;
  std::map<std::string, Eigen::MatrixXd> probs;
  // split -> rows of {tokens, scores}
  std::map<std::string, std::vector<std::pair<std::vector<std::string>, std::vector<double>>>>
      saliency;
  // split -> (samples, (N*M) x C values)
  std::map<std::string, std::pair<int, Eigen::MatrixXd>> mc_samples;
  std::map<std::string, std::vector<json>> perturbed;
  std::string provider_url;
};

struct ProjectData {
  std::string name = "fixture";
  std::vector<std::string> classes;
  std::string rejection = "oos";
  std::map<std::string, SplitData> splits;
  std::map<std::string, Eigen::MatrixXf> embeddings;
  std::map<std::string, std::vector<json>> syntax;
  std::vector<PipelineData> pipelines;
  json thresholds = json::object();
  std::optional<std::uint64_t> seed;
};

inline void write_embeddings(const fs::path& path, const Eigen::MatrixXf& m) {
  std::vector<float> values;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) values.push_back(m(i, j));
  }
  fs::create_directories(path.parent_path());
  write_float_matrix(path, m.rows(), m.cols(), 0, values);
}

// Writes every artifact under `dir` with relative paths and returns the
// config path.
inline fs::path write_project(const fs::path& dir, const ProjectData& p) {
  json cfg;
  cfg["project_name"] = p.name;
  cfg["classes"] = p.classes;
  cfg["rejection_class"] = p.rejection;
  cfg["thresholds"] = p.thresholds;
  if (p.seed) cfg["seed"] = *p.seed;
  for (const auto& [name, s] : p.splits) {
    std::vector<json> rows;
    for (std::size_t i = 0; i < s.texts.size(); ++i) {
      rows.push_back({{"id", i}, {"text", s.texts[i]}, {"label", s.labels[i]}});
    }
    write_jsonl(dir / ("data/" + name + ".jsonl"), rows);
    cfg["splits"][name] = "data/" + name + ".jsonl";
  }
  for (const auto& [name, m] : p.embeddings) {
    write_embeddings(dir / ("data/" + name + ".emb"), m);
    cfg["embeddings"][name] = "data/" + name + ".emb";
  }
  for (const auto& [name, rows] : p.syntax) {
    std::vector<json> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      json r = rows[i];
      r["id"] = i;
      out.push_back(r);
    }
    write_jsonl(dir / ("data/" + name + ".syntax.jsonl"), out);
    cfg["syntax"][name] = "data/" + name + ".syntax.jsonl";
  }
  cfg["pipelines"] = json::array();
  for (const auto& pl : p.pipelines) {
    json pj;
    pj["id"] = pl.id;
    if (pl.threshold) pj["prediction_threshold"] = *pl.threshold;
    const std::string base = "pipelines/" + pl.id + "/";
    for (const auto& [split, probs] : pl.probs) {
      write_jsonl(dir / (base + split + ".pred.jsonl"), prob_rows(probs));
      pj["predictions"][split] = base + split + ".pred.jsonl";
    }
    for (const auto& [split, rows] : pl.saliency) {
      std::vector<json> out;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out.push_back({{"id", i}, {"tokens", rows[i].first}, {"scores", rows[i].second}});
      }
      write_jsonl(dir / (base + split + ".saliency.jsonl"), out);
      pj["saliency"][split] = base + split + ".saliency.jsonl";
    }
    for (const auto& [split, mc] : pl.mc_samples) {
      const auto& [samples, values] = mc;
      std::vector<float> flat;
      for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
          flat.push_back(static_cast<float>(values(i, j)));
        }
      }
      fs::create_directories(dir / base);
      write_float_matrix(dir / (base + split + ".mc"), values.rows() / samples, values.cols(),
                         samples, flat);
      pj["mc_samples"][split] = base + split + ".mc";
    }
    for (const auto& [split, rows] : pl.perturbed) {
      write_jsonl(dir / (base + split + ".perturbed.jsonl"), rows);
      pj["perturbed_predictions"][split] = base + split + ".perturbed.jsonl";
    }
    if (!pl.provider_url.empty()) pj["provider_url"] = pl.provider_url;
    cfg["pipelines"].push_back(pj);
  }
  const fs::path path = dir / "config.json";
  write_file(path, cfg.dump(2));
  return path;
}

// Rows drawn from a Dirichlet(1, ..., 1) distribution, in double.
inline Eigen::MatrixXd random_probs(std::mt19937_64& rng, Eigen::Index n, Eigen::Index c) {
  std::exponential_distribution<double> exp(1.0);
  Eigen::MatrixXd m(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = exp(rng);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

// One-hot-ish row: `p` on `cls`, the rest spread evenly.
inline Eigen::RowVectorXd peaked(Eigen::Index classes, Eigen::Index cls, double p) {
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Constant(classes, (1.0 - p) / (classes - 1));
  r(cls) = p;
  return r;
}

// The Error thrown by `f`, or nullopt when it returns normally.
template <typename F>
std::optional<Error> thrown_error(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  return std::nullopt;
}

}  // namespace errscope::testing

#endif  // ERRSCOPE_TESTS_SUPPORT_FIXTURE_HPP_
