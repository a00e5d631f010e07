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

#ifndef ERRSCOPE_INGESTION_HPP_
#define ERRSCOPE_INGESTION_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "errscope/config.hpp"
#include "json.hpp"

namespace errscope {

struct Utterance {
  std::int64_t id = 0;
  std::string text;
  ClassIndex label = 0;
};

struct Split {
  std::string name;
  std::vector<Utterance> utterances;

  std::size_t size() const { return utterances.size(); }
  bool contains(std::int64_t id) const {
    return id >= 0 && static_cast<std::size_t>(id) < utterances.size();
  }
  // Alignment is positional: utterance id i lives at row i.
  const Utterance& at(std::int64_t id) const;
};

using RowMatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One row per utterance, one column per model output class.
struct PredictionTable {
  std::string pipeline_id;
  std::string split;
  Eigen::MatrixXd probs;
  std::filesystem::path source;
};

struct EmbeddingMatrix {
  std::string split;
  RowMatrixXf rows;
  std::filesystem::path source;
};

struct SaliencyRow {
  std::vector<std::string> tokens;
  std::vector<double> scores;
};

struct SaliencyTable {
  std::string pipeline_id;
  std::string split;
  std::vector<SaliencyRow> rows;
  std::filesystem::path source;
};

struct SyntaxRow {
  bool has_subject = true;
  bool has_verb = true;
  bool has_object = true;
  std::optional<int> token_count_override;
};

struct SyntaxTable {
  std::string split;
  std::vector<SyntaxRow> rows;
  std::filesystem::path source;
};

// M stochastic probability vectors per utterance, stacked: rows
// [i*M, (i+1)*M) belong to utterance i.
struct McSampleTable {
  std::string pipeline_id;
  std::string split;
  int samples = 0;
  Eigen::MatrixXd values;
  std::filesystem::path source;

  auto utterance(std::int64_t id) const {
    return values.middleRows(static_cast<Eigen::Index>(id) * samples, samples);
  }
};

// Perturbed-text prediction record from a file-backed provider.
struct PerturbedPredictionRow {
  std::int64_t id = 0;
  std::string test_name;
  Eigen::VectorXd probs;
  // Only user-defined tests carry these; engine-generated variants are
  // regenerated from the seed.
  std::optional<std::string> family;
  std::optional<std::string> perturbed_text;
};

using PipelineSplitKey = std::pair<std::string, std::string>;  // (pipeline, split)

// Everything loaded from disk. Immutable after load_artifacts returns.
struct ProjectState {
  ProjectConfig config;
  std::map<std::string, Split> splits;
  std::map<std::string, EmbeddingMatrix> embeddings;
  std::map<std::string, SyntaxTable> syntax;
  std::map<PipelineSplitKey, PredictionTable> predictions;
  std::map<PipelineSplitKey, SaliencyTable> saliency;
  std::map<PipelineSplitKey, McSampleTable> mc_samples;
  // Config hash mixed with the bytes of every artifact file read.
  std::uint64_t fingerprint = 0;

  const Split& split(std::string_view name) const;
  const PredictionTable& prediction_table(std::string_view pipeline,
                                          std::string_view split) const;
  bool has_predictions(std::string_view pipeline,
                       std::string_view split) const;
  const EmbeddingMatrix* embedding(std::string_view split) const;
  const SyntaxTable* syntax_table(std::string_view split) const;
  const SaliencyTable* saliency_table(std::string_view pipeline,
                                      std::string_view split) const;
  const McSampleTable* mc_table(std::string_view pipeline,
                                std::string_view split) const;
};

ProjectState load_artifacts(const ProjectConfig& config);

// Low-level readers, exposed for tests and the CLI.
Split read_dataset(const std::filesystem::path& path, const std::string& split,
                   const ProjectConfig& config);
Eigen::MatrixXd read_prediction_rows(const std::filesystem::path& path,
                                     int class_count);
// Reads "rows dim [samples]\n" followed by little-endian float32 values.
struct FloatMatrixFile {
  std::int64_t rows = 0;
  std::int64_t dim = 0;
  std::int64_t samples = 0;  // 0 when the header has two fields
  std::vector<float> values;
};
FloatMatrixFile read_float_matrix(const std::filesystem::path& path);
void write_float_matrix(const std::filesystem::path& path, std::int64_t rows,
                        std::int64_t dim, std::int64_t samples,
                        const std::vector<float>& values);
std::vector<PerturbedPredictionRow> read_perturbed_predictions(
    const std::filesystem::path& path, int class_count);

struct ValidationEntry {
  std::string file;
  std::string check;
  std::optional<std::int64_t> utterance_id;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationEntry> entries;
};

inline constexpr double kProbabilityTolerance = 1e-4;

ValidationReport validate_artifacts(const ProjectState& state);

nlohmann::json state_to_json(const ProjectState& state);
nlohmann::json validation_to_json(const ValidationReport& report);

}  // namespace errscope

#endif  // ERRSCOPE_INGESTION_HPP_
