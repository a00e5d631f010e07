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

#ifndef ERRSCOPE_PREDICTION_HPP_
#define ERRSCOPE_PREDICTION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "errscope/config.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/smart_tags.hpp"

namespace errscope {

enum class Outcome : std::uint8_t {
  kCorrectAndPredicted,
  kCorrectAndRejected,
  kIncorrectAndPredicted,
  kIncorrectAndRejected,
};
inline constexpr int kOutcomeCount = 4;

std::string_view outcome_name(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view name);
constexpr bool is_correct(Outcome o) {
  return o == Outcome::kCorrectAndPredicted || o == Outcome::kCorrectAndRejected;
}

using OutcomeCounts = std::array<std::int64_t, kOutcomeCount>;

struct PostprocessedPrediction {
  ClassIndex top_class = 0;
  // Raw model top probability; thresholding never changes it.
  double top_confidence = 0.0;
  // Model classes by descending probability, ties by ascending index.
  std::vector<ClassIndex> ranked_classes;

  friend bool operator==(const PostprocessedPrediction&,
                         const PostprocessedPrediction&) = default;
};

// Rejects to `rejection_class` iff the top probability is strictly below
// `threshold`.
PostprocessedPrediction postprocess(const Eigen::Ref<const Eigen::VectorXd>& probs,
                                    double threshold, ClassIndex rejection_class);

Outcome outcome_of(ClassIndex label, const PostprocessedPrediction& post,
                   ClassIndex rejection_class);

struct StagePredictions {
  std::vector<PostprocessedPrediction> predictions;
  std::vector<Outcome> outcomes;
};

// Predictions for one (split, pipeline) pair at both stages: `raw` uses
// threshold 0 (argmax), `post` the pipeline's configured threshold.
struct PredictionSet {
  std::string pipeline_id;
  std::string split;
  int class_count = 0;
  double threshold = 0.0;
  StagePredictions raw;
  StagePredictions post;

  const StagePredictions& stage(bool postprocessed) const {
    return postprocessed ? post : raw;
  }
  std::size_t size() const { return raw.predictions.size(); }
};

PredictionSet predict_split(const Split& split, const PredictionTable& table,
                            double threshold, ClassIndex rejection_class);

struct ClassMetrics {
  ClassIndex class_index = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;    // labelled instances
  std::int64_t predicted = 0;  // predicted instances
};

struct MetricsReport {
  bool empty = true;
  std::int64_t population_size = 0;
  double accuracy = 0.0;
  // One entry per declared class, rejection class last.
  std::vector<ClassMetrics> per_class;
  // Mean F1 over classes that occur as a label or a prediction.
  double macro_f1 = 0.0;
  double ece = 0.0;
  OutcomeCounts outcome_counts{};
};

// Metrics over exactly `population` (utterance ids). ECE always uses raw
// top confidence against raw top-1 correctness. An empty population yields
// a report with `empty = true` and zeroed fields.
MetricsReport compute_metrics(std::span<const std::int64_t> population,
                              const Split& split, const PredictionSet& predictions,
                              bool postprocessed, int ece_bins);

// Rows are labels, columns post-processed (or raw) predictions; both range
// over every declared class with the rejection class last.
Eigen::MatrixXd confusion_matrix(std::span<const std::int64_t> population,
                                 const Split& split, const PredictionSet& predictions,
                                 bool postprocessed, bool normalized);

inline constexpr int kHistogramBins = 20;

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t correct_count = 0;
  std::int64_t incorrect_count = 0;
};

std::vector<HistogramBin> confidence_histogram(std::span<const std::int64_t> population,
                                               const PredictionSet& predictions,
                                               bool postprocessed);

// Post-processed comparison across every configured pipeline. Fewer than two
// pipelines yields the empty set.
TagSet pipeline_comparison_tags(std::int64_t id, ClassIndex label,
                                std::span<const PredictionSet* const> pipelines);

struct SweepPoint {
  double threshold = 0.0;
  double accuracy = 0.0;
  OutcomeCounts outcome_counts{};
};

std::vector<SweepPoint> threshold_sweep(std::span<const std::int64_t> population,
                                        const Split& split, const PredictionTable& table,
                                        std::span<const double> thresholds,
                                        ClassIndex rejection_class);

// Every id in the split, ascending.
std::vector<std::int64_t> all_ids(const Split& split);

}  // namespace errscope

#endif  // ERRSCOPE_PREDICTION_HPP_
