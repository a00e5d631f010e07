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

#ifndef ERRSCOPE_SERIALIZATION_HPP_
#define ERRSCOPE_SERIALIZATION_HPP_

// JSON conversions. The ADL to_json/from_json pairs are the cache encoding
// (class indices, exact doubles); the *_to_api functions render the HTTP
// representation with class names.

#include <vector>

#include "errscope/action_store.hpp"
#include "errscope/behavioral.hpp"
#include "errscope/config.hpp"
#include "errscope/prediction.hpp"
#include "errscope/query.hpp"
#include "errscope/saliency.hpp"
#include "errscope/similarity.hpp"
#include "errscope/smart_tags.hpp"
#include "errscope/uncertainty.hpp"
#include "errscope/warnings.hpp"
#include "json.hpp"

namespace errscope {

void to_json(nlohmann::json& j, const TagSet& v);
void from_json(const nlohmann::json& j, TagSet& v);
void to_json(nlohmann::json& j, const Outcome& v);
void from_json(const nlohmann::json& j, Outcome& v);
void to_json(nlohmann::json& j, const PerturbationFamily& v);
void from_json(const nlohmann::json& j, PerturbationFamily& v);
void to_json(nlohmann::json& j, const WarningKind& v);
void from_json(const nlohmann::json& j, WarningKind& v);

void to_json(nlohmann::json& j, const PostprocessedPrediction& v);
void from_json(const nlohmann::json& j, PostprocessedPrediction& v);
void to_json(nlohmann::json& j, const StagePredictions& v);
void from_json(const nlohmann::json& j, StagePredictions& v);
void to_json(nlohmann::json& j, const PredictionSet& v);
void from_json(const nlohmann::json& j, PredictionSet& v);
void to_json(nlohmann::json& j, const ClassMetrics& v);
void from_json(const nlohmann::json& j, ClassMetrics& v);
void to_json(nlohmann::json& j, const MetricsReport& v);
void from_json(const nlohmann::json& j, MetricsReport& v);
void to_json(nlohmann::json& j, const Warning& v);
void from_json(const nlohmann::json& j, Warning& v);
void to_json(nlohmann::json& j, const Neighbor& v);
void from_json(const nlohmann::json& j, Neighbor& v);
void to_json(nlohmann::json& j, const NeighborTable& v);
void from_json(const nlohmann::json& j, NeighborTable& v);
void to_json(nlohmann::json& j, const PerturbedVariant& v);
void from_json(const nlohmann::json& j, PerturbedVariant& v);
void to_json(nlohmann::json& j, const InvarianceResult& v);
void from_json(const nlohmann::json& j, InvarianceResult& v);
void to_json(nlohmann::json& j, const FailureRate& v);
void from_json(const nlohmann::json& j, FailureRate& v);
void to_json(nlohmann::json& j, const BehavioralSummary& v);
void from_json(const nlohmann::json& j, BehavioralSummary& v);
void to_json(nlohmann::json& j, const EpistemicScore& v);
void from_json(const nlohmann::json& j, EpistemicScore& v);
void to_json(nlohmann::json& j, const WordImportance& v);
void from_json(const nlohmann::json& j, WordImportance& v);
void to_json(nlohmann::json& j, const SalientWords& v);
void from_json(const nlohmann::json& j, SalientWords& v);
void to_json(nlohmann::json& j, const HistogramBin& v);
void from_json(const nlohmann::json& j, HistogramBin& v);
void to_json(nlohmann::json& j, const SweepPoint& v);
void from_json(const nlohmann::json& j, SweepPoint& v);

nlohmann::json tags_to_api(TagSet tags);
nlohmann::json outcome_counts_to_api(const OutcomeCounts& counts);
nlohmann::json metrics_to_api(const MetricsReport& report, const ProjectConfig& config);
nlohmann::json warnings_to_api(const std::vector<Warning>& warnings,
                               const ProjectConfig& config);
nlohmann::json confusion_to_api(const Eigen::MatrixXd& matrix, const ProjectConfig& config,
                                bool normalized);
nlohmann::json histogram_to_api(const std::vector<HistogramBin>& bins);
nlohmann::json salient_words_to_api(const SalientWords& words);
nlohmann::json behavioral_summary_to_api(const BehavioralSummary& summary);
nlohmann::json sweep_to_api(const std::vector<SweepPoint>& points);
nlohmann::json action_to_api(const ProposedAction& action);

}  // namespace errscope

#endif  // ERRSCOPE_SERIALIZATION_HPP_
