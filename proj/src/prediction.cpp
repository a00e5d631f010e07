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

#include "errscope/prediction.hpp"

#include <algorithm>
#include <numeric>

#include "errscope/calibration.hpp"
#include "errscope/error.hpp"

namespace errscope {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void check_population(std::span<const std::int64_t> population, std::size_t size) {
  for (auto id : population) {
    if (id < 0 || static_cast<std::size_t>(id) >= size) {
      throw Error(ErrorCode::kUnknownUtterance,
                  "population references unknown utterance " + std::to_string(id));
    }
  }
}

}  // namespace

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::kCorrectAndPredicted: return "CorrectAndPredicted";
    case Outcome::kCorrectAndRejected: return "CorrectAndRejected";
    case Outcome::kIncorrectAndPredicted: return "IncorrectAndPredicted";
    case Outcome::kIncorrectAndRejected: return "IncorrectAndRejected";
  }
  return "";
}

std::optional<Outcome> parse_outcome(std::string_view name) {
  for (int i = 0; i < kOutcomeCount; ++i) {
    const auto o = static_cast<Outcome>(i);
    if (outcome_name(o) == name) return o;
  }
  return std::nullopt;
}

PostprocessedPrediction postprocess(const Eigen::Ref<const Eigen::VectorXd>& probs,
                                    double threshold, ClassIndex rejection_class) {
  if (probs.size() == 0) {
    throw Error(ErrorCode::kEmptyVector, "postprocess: empty probability vector");
  }
  PostprocessedPrediction out;
  out.ranked_classes.resize(static_cast<std::size_t>(probs.size()));
  std::iota(out.ranked_classes.begin(), out.ranked_classes.end(), 0);
  std::stable_sort(out.ranked_classes.begin(), out.ranked_classes.end(),
                   [&](ClassIndex a, ClassIndex b) { return probs(a) > probs(b); });
  const ClassIndex argmax = out.ranked_classes.front();
  out.top_confidence = probs(argmax);
  out.top_class = out.top_confidence < threshold ? rejection_class : argmax;
  return out;
}

Outcome outcome_of(ClassIndex label, const PostprocessedPrediction& post,
                   ClassIndex rejection_class) {
  const bool rejected = post.top_class == rejection_class;
  if (post.top_class == label) {
    return rejected ? Outcome::kCorrectAndRejected : Outcome::kCorrectAndPredicted;
  }
  return rejected ? Outcome::kIncorrectAndRejected : Outcome::kIncorrectAndPredicted;
}

PredictionSet predict_split(const Split& split, const PredictionTable& table,
                            double threshold, ClassIndex rejection_class) {
  if (static_cast<std::size_t>(table.probs.rows()) != split.size()) {
    throw Error(ErrorCode::kRowCountMismatch,
                "prediction table for '" + table.pipeline_id + "' does not match split '" +
                    split.name + "'");
  }
  PredictionSet set;
  set.pipeline_id = table.pipeline_id;
  set.split = split.name;
  set.class_count = static_cast<int>(table.probs.cols());
  set.threshold = threshold;
  const std::size_t n = split.size();
  for (StagePredictions* s : {&set.raw, &set.post}) {
    s->predictions.reserve(n);
    s->outcomes.reserve(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd p = table.probs.row(static_cast<Eigen::Index>(i)).transpose();
    PostprocessedPrediction raw = postprocess(p, 0.0, rejection_class);
    PostprocessedPrediction post = raw;
    if (post.top_confidence < threshold) post.top_class = rejection_class;
    const ClassIndex label = split.utterances[i].label;
    set.raw.outcomes.push_back(outcome_of(label, raw, rejection_class));
    set.post.outcomes.push_back(outcome_of(label, post, rejection_class));
    set.raw.predictions.push_back(std::move(raw));
    set.post.predictions.push_back(std::move(post));
  }
  return set;
}

MetricsReport compute_metrics(std::span<const std::int64_t> population,
                              const Split& split, const PredictionSet& predictions,
                              bool postprocessed, int ece_bins) {
  check_population(population, predictions.size());
  MetricsReport report;
  const int declared = predictions.class_count + 1;
  report.per_class.resize(static_cast<std::size_t>(declared));
  for (int c = 0; c < declared; ++c) report.per_class[c].class_index = c;
  if (population.empty()) return report;

  report.empty = false;
  report.population_size = static_cast<std::int64_t>(population.size());
  const StagePredictions& stage = predictions.stage(postprocessed);
  std::vector<std::int64_t> true_positive(static_cast<std::size_t>(declared), 0);
  Eigen::ArrayXd confidence(static_cast<Eigen::Index>(population.size()));
  Eigen::ArrayXd top1_correct(static_cast<Eigen::Index>(population.size()));
  Eigen::Index row = 0;
  for (auto id : population) {
    const auto i = static_cast<std::size_t>(id);
    const ClassIndex label = split.utterances[i].label;
    const ClassIndex predicted = stage.predictions[i].top_class;
    ++report.outcome_counts[static_cast<std::size_t>(stage.outcomes[i])];
    ++report.per_class[label].support;
    ++report.per_class[predicted].predicted;
    if (label == predicted) ++true_positive[label];
    const auto& raw = predictions.raw.predictions[i];
    confidence(row) = raw.top_confidence;
    top1_correct(row) = raw.ranked_classes.front() == label ? 1.0 : 0.0;
    ++row;
  }
  const auto n = static_cast<double>(population.size());
  report.accuracy =
      static_cast<double>(report.outcome_counts[0] + report.outcome_counts[1]) / n;

  double f1_sum = 0.0;
  int f1_classes = 0;
  for (auto& m : report.per_class) {
    const auto tp = static_cast<double>(true_positive[m.class_index]);
    m.precision = ratio(tp, static_cast<double>(m.predicted));
    m.recall = ratio(tp, static_cast<double>(m.support));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    if (m.support > 0 || m.predicted > 0) {
      f1_sum += m.f1;
      ++f1_classes;
    }
  }
  report.macro_f1 = ratio(f1_sum, f1_classes);
  report.ece = expected_calibration_error(confidence, top1_correct, ece_bins);
  return report;
}

Eigen::MatrixXd confusion_matrix(std::span<const std::int64_t> population,
                                 const Split& split, const PredictionSet& predictions,
                                 bool postprocessed, bool normalized) {
  check_population(population, predictions.size());
  const int declared = predictions.class_count + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(declared, declared);
  const StagePredictions& stage = predictions.stage(postprocessed);
  for (auto id : population) {
    const auto i = static_cast<std::size_t>(id);
    m(split.utterances[i].label, stage.predictions[i].top_class) += 1.0;
  }
  if (normalized) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double total = m.row(r).sum();
      if (total > 0.0) m.row(r) /= total;
    }
  }
  return m;
}

std::vector<HistogramBin> confidence_histogram(std::span<const std::int64_t> population,
                                               const PredictionSet& predictions,
                                               bool postprocessed) {
  check_population(population, predictions.size());
  std::vector<HistogramBin> bins(kHistogramBins);
  for (int b = 0; b < kHistogramBins; ++b) {
    bins[b].lower = static_cast<double>(b) / kHistogramBins;
    bins[b].upper = static_cast<double>(b + 1) / kHistogramBins;
  }
  const StagePredictions& stage = predictions.stage(postprocessed);
  for (auto id : population) {
    const auto i = static_cast<std::size_t>(id);
    auto& bin = bins[left_closed_bin(stage.predictions[i].top_confidence, kHistogramBins)];
    if (is_correct(stage.outcomes[i])) {
      ++bin.correct_count;
    } else {
      ++bin.incorrect_count;
    }
  }
  return bins;
}

TagSet pipeline_comparison_tags(std::int64_t id, ClassIndex /*label*/,
                                std::span<const PredictionSet* const> pipelines) {
  TagSet tags;
  if (pipelines.size() < 2) return tags;
  const auto i = static_cast<std::size_t>(id);
  bool all_incorrect = true;
  bool disagree = false;
  const ClassIndex first = pipelines.front()->post.predictions.at(i).top_class;
  for (const PredictionSet* p : pipelines) {
    if (is_correct(p->post.outcomes.at(i))) all_incorrect = false;
    if (p->post.predictions.at(i).top_class != first) disagree = true;
  }
  if (all_incorrect) tags.insert(SmartTag::kIncorrectForAllPipelines);
  if (disagree) tags.insert(SmartTag::kPipelineDisagreement);
  return tags;
}

std::vector<SweepPoint> threshold_sweep(std::span<const std::int64_t> population,
                                        const Split& split, const PredictionTable& table,
                                        std::span<const double> thresholds,
                                        ClassIndex rejection_class) {
  check_population(population, split.size());
  for (double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw Error(ErrorCode::kInvalidThreshold, "threshold_sweep: threshold outside [0, 1]");
    }
  }
  // Top class and confidence do not depend on the threshold.
  std::vector<ClassIndex> argmax;
  std::vector<double> top;
  argmax.reserve(population.size());
  top.reserve(population.size());
  for (auto id : population) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < table.probs.cols(); ++c) {
      if (table.probs(id, c) > table.probs(id, best)) best = c;
    }
    top.push_back(table.probs(id, best));
    argmax.push_back(static_cast<ClassIndex>(best));
  }
  std::vector<SweepPoint> points;
  points.reserve(thresholds.size());
  for (double t : thresholds) {
    SweepPoint pt;
    pt.threshold = t;
    for (std::size_t k = 0; k < population.size(); ++k) {
      PostprocessedPrediction post;
      post.top_confidence = top[k];
      post.top_class = top[k] < t ? rejection_class : argmax[k];
      const ClassIndex label = split.utterances[static_cast<std::size_t>(population[k])].label;
      ++pt.outcome_counts[static_cast<std::size_t>(outcome_of(label, post, rejection_class))];
    }
    if (!population.empty()) {
      pt.accuracy = static_cast<double>(pt.outcome_counts[0] + pt.outcome_counts[1]) /
                    static_cast<double>(population.size());
    }
    points.push_back(pt);
  }
  return points;
}

std::vector<std::int64_t> all_ids(const Split& split) {
  std::vector<std::int64_t> ids(split.size());
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return ids;
}

}  // namespace errscope
