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

#include "errscope/serialization.hpp"

#include "errscope/error.hpp"

namespace errscope {

using nlohmann::json;

namespace {

template <typename E, typename Parse>
E parse_enum(const json& j, Parse parse, const char* what) {
  const auto name = j.get<std::string>();
  auto v = parse(name);
  if (!v) throw Error(ErrorCode::kBadRequest, std::string("unknown ") + what + ": " + name);
  return *v;
}

std::optional<WarningKind> parse_warning_kind(std::string_view name) {
  for (auto k : {WarningKind::kClassTooSmall, WarningKind::kClassProportionShift,
                 WarningKind::kMissingClass, WarningKind::kLengthMismatch}) {
    if (warning_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

void to_json(json& j, const TagSet& v) { j = v.bits(); }
void from_json(const json& j, TagSet& v) { v = TagSet::from_bits(j.get<std::uint32_t>()); }

void to_json(json& j, const Outcome& v) { j = outcome_name(v); }
void from_json(const json& j, Outcome& v) {
  v = parse_enum<Outcome>(j, parse_outcome, "outcome");
}

void to_json(json& j, const PerturbationFamily& v) { j = family_name(v); }
void from_json(const json& j, PerturbationFamily& v) {
  v = parse_enum<PerturbationFamily>(j, parse_perturbation_family, "perturbation family");
}

void to_json(json& j, const WarningKind& v) { j = warning_kind_name(v); }
void from_json(const json& j, WarningKind& v) {
  v = parse_enum<WarningKind>(j, parse_warning_kind, "warning kind");
}

void to_json(json& j, const PostprocessedPrediction& v) {
  j = {{"top_class", v.top_class},
       {"top_confidence", v.top_confidence},
       {"ranked_classes", v.ranked_classes}};
}
void from_json(const json& j, PostprocessedPrediction& v) {
  j.at("top_class").get_to(v.top_class);
  j.at("top_confidence").get_to(v.top_confidence);
  j.at("ranked_classes").get_to(v.ranked_classes);
}

void to_json(json& j, const StagePredictions& v) {
  j = {{"predictions", v.predictions}, {"outcomes", v.outcomes}};
}
void from_json(const json& j, StagePredictions& v) {
  j.at("predictions").get_to(v.predictions);
  j.at("outcomes").get_to(v.outcomes);
}

void to_json(json& j, const PredictionSet& v) {
  j = {{"pipeline_id", v.pipeline_id}, {"split", v.split},   {"class_count", v.class_count},
       {"threshold", v.threshold},     {"raw", v.raw},       {"post", v.post}};
}
void from_json(const json& j, PredictionSet& v) {
  j.at("pipeline_id").get_to(v.pipeline_id);
  j.at("split").get_to(v.split);
  j.at("class_count").get_to(v.class_count);
  j.at("threshold").get_to(v.threshold);
  j.at("raw").get_to(v.raw);
  j.at("post").get_to(v.post);
}

void to_json(json& j, const ClassMetrics& v) {
  j = {{"class_index", v.class_index}, {"precision", v.precision}, {"recall", v.recall},
       {"f1", v.f1},                   {"support", v.support},     {"predicted", v.predicted}};
}
void from_json(const json& j, ClassMetrics& v) {
  j.at("class_index").get_to(v.class_index);
  j.at("precision").get_to(v.precision);
  j.at("recall").get_to(v.recall);
  j.at("f1").get_to(v.f1);
  j.at("support").get_to(v.support);
  j.at("predicted").get_to(v.predicted);
}

void to_json(json& j, const MetricsReport& v) {
  j = {{"empty", v.empty},       {"population_size", v.population_size},
       {"accuracy", v.accuracy}, {"per_class", v.per_class},
       {"macro_f1", v.macro_f1}, {"ece", v.ece},
       {"outcome_counts", v.outcome_counts}};
}
void from_json(const json& j, MetricsReport& v) {
  j.at("empty").get_to(v.empty);
  j.at("population_size").get_to(v.population_size);
  j.at("accuracy").get_to(v.accuracy);
  j.at("per_class").get_to(v.per_class);
  j.at("macro_f1").get_to(v.macro_f1);
  j.at("ece").get_to(v.ece);
  j.at("outcome_counts").get_to(v.outcome_counts);
}

void to_json(json& j, const Warning& v) {
  j = {{"kind", v.kind},
       {"severity", severity_name(v.severity)},
       {"split", v.split},
       {"class_index", v.class_index ? json(*v.class_index) : json(nullptr)},
       {"evidence", v.evidence}};
}
void from_json(const json& j, Warning& v) {
  j.at("kind").get_to(v.kind);
  v.severity = j.at("severity").get<std::string>() == severity_name(Severity::kInfo)
                   ? Severity::kInfo
                   : Severity::kWarning;
  j.at("split").get_to(v.split);
  const auto& c = j.at("class_index");
  v.class_index = c.is_null() ? std::nullopt : std::optional<ClassIndex>(c.get<ClassIndex>());
  j.at("evidence").get_to(v.evidence);
}

void to_json(json& j, const Neighbor& v) { j = json::array({v.id, v.similarity}); }
void from_json(const json& j, Neighbor& v) {
  j.at(0).get_to(v.id);
  j.at(1).get_to(v.similarity);
}

void to_json(json& j, const NeighborTable& v) {
  j = {{"query_split", v.query_split},
       {"target_split", v.target_split},
       {"k", v.k},
       {"rows", v.rows}};
}
void from_json(const json& j, NeighborTable& v) {
  j.at("query_split").get_to(v.query_split);
  j.at("target_split").get_to(v.target_split);
  j.at("k").get_to(v.k);
  j.at("rows").get_to(v.rows);
}

void to_json(json& j, const PerturbedVariant& v) {
  j = {{"split", v.split},         {"id", v.id},
       {"family", v.family},       {"test_name", v.test_name},
       {"perturbed_text", v.perturbed_text}};
}
void from_json(const json& j, PerturbedVariant& v) {
  j.at("split").get_to(v.split);
  j.at("id").get_to(v.id);
  j.at("family").get_to(v.family);
  j.at("test_name").get_to(v.test_name);
  j.at("perturbed_text").get_to(v.perturbed_text);
}

void to_json(json& j, const InvarianceResult& v) {
  j = {{"variant", v.variant},
       {"original_class", v.original_class},
       {"perturbed_class", v.perturbed_class},
       {"confidence_delta", v.confidence_delta},
       {"passed", v.passed}};
}
void from_json(const json& j, InvarianceResult& v) {
  j.at("variant").get_to(v.variant);
  j.at("original_class").get_to(v.original_class);
  j.at("perturbed_class").get_to(v.perturbed_class);
  j.at("confidence_delta").get_to(v.confidence_delta);
  j.at("passed").get_to(v.passed);
}

void to_json(json& j, const FailureRate& v) {
  j = {{"name", v.name},
       {"family", v.family},
       {"total", v.total},
       {"failed", v.failed},
       {"failure_rate", v.failure_rate}};
}
void from_json(const json& j, FailureRate& v) {
  j.at("name").get_to(v.name);
  j.at("family").get_to(v.family);
  j.at("total").get_to(v.total);
  j.at("failed").get_to(v.failed);
  j.at("failure_rate").get_to(v.failure_rate);
}

void to_json(json& j, const BehavioralSummary& v) {
  j = {{"tags", v.tags}, {"families", v.families}, {"tests", v.tests}};
}
void from_json(const json& j, BehavioralSummary& v) {
  j.at("tags").get_to(v.tags);
  j.at("families").get_to(v.families);
  j.at("tests").get_to(v.tests);
}

void to_json(json& j, const EpistemicScore& v) {
  j = {{"bald", v.bald},
       {"predictive_entropy", v.predictive_entropy},
       {"sample_count", v.sample_count}};
}
void from_json(const json& j, EpistemicScore& v) {
  j.at("bald").get_to(v.bald);
  j.at("predictive_entropy").get_to(v.predictive_entropy);
  j.at("sample_count").get_to(v.sample_count);
}

void to_json(json& j, const WordImportance& v) {
  j = {{"word", v.word}, {"weight", v.weight}, {"support", v.support}};
}
void from_json(const json& j, WordImportance& v) {
  j.at("word").get_to(v.word);
  j.at("weight").get_to(v.weight);
  j.at("support").get_to(v.support);
}

void to_json(json& j, const SalientWords& v) {
  j = {{"correct", v.correct}, {"incorrect", v.incorrect}};
}
void from_json(const json& j, SalientWords& v) {
  j.at("correct").get_to(v.correct);
  j.at("incorrect").get_to(v.incorrect);
}

void to_json(json& j, const HistogramBin& v) {
  j = {{"lower", v.lower},
       {"upper", v.upper},
       {"correct_count", v.correct_count},
       {"incorrect_count", v.incorrect_count}};
}
void from_json(const json& j, HistogramBin& v) {
  j.at("lower").get_to(v.lower);
  j.at("upper").get_to(v.upper);
  j.at("correct_count").get_to(v.correct_count);
  j.at("incorrect_count").get_to(v.incorrect_count);
}

void to_json(json& j, const SweepPoint& v) {
  j = {{"threshold", v.threshold},
       {"accuracy", v.accuracy},
       {"outcome_counts", outcome_counts_to_api(v.outcome_counts)}};
}
void from_json(const json& j, SweepPoint& v) {
  j.at("threshold").get_to(v.threshold);
  j.at("accuracy").get_to(v.accuracy);
  const auto& c = j.at("outcome_counts");
  for (int o = 0; o < kOutcomeCount; ++o) {
    v.outcome_counts[o] = c.at(std::string(outcome_name(static_cast<Outcome>(o))));
  }
}

json tags_to_api(TagSet tags) {
  json out = json::array();
  for (auto name : tags.names()) out.push_back(name);
  return out;
}

json outcome_counts_to_api(const OutcomeCounts& counts) {
  json out = json::object();
  for (int o = 0; o < kOutcomeCount; ++o) {
    out[std::string(outcome_name(static_cast<Outcome>(o)))] = counts[o];
  }
  return out;
}

json metrics_to_api(const MetricsReport& r, const ProjectConfig& config) {
  json per_class = json::array();
  for (const auto& c : r.per_class) {
    per_class.push_back({{"class", config.class_name(c.class_index)},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support},
                         {"predicted", c.predicted}});
  }
  return {{"empty", r.empty},
          {"population_size", r.population_size},
          {"accuracy", r.accuracy},
          {"macro_f1", r.macro_f1},
          {"ece", r.ece},
          {"per_class", per_class},
          {"outcome_counts", outcome_counts_to_api(r.outcome_counts)}};
}

json warnings_to_api(const std::vector<Warning>& warnings, const ProjectConfig& config) {
  json out = json::array();
  for (const auto& w : warnings) {
    out.push_back({{"kind", warning_kind_name(w.kind)},
                   {"severity", severity_name(w.severity)},
                   {"split", w.split},
                   {"class", w.class_index ? json(config.class_name(*w.class_index))
                                           : json(nullptr)},
                   {"evidence", w.evidence}});
  }
  return out;
}

json confusion_to_api(const Eigen::MatrixXd& m, const ProjectConfig& config, bool normalized) {
  json classes = json::array();
  for (int c = 0; c < config.declared_class_count(); ++c) classes.push_back(config.class_name(c));
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (normalized) {
        row.push_back(m(r, c));
      } else {
        row.push_back(static_cast<std::int64_t>(m(r, c)));
      }
    }
    rows.push_back(std::move(row));
  }
  return {{"classes", classes}, {"normalized", normalized}, {"matrix", rows}};
}

json histogram_to_api(const std::vector<HistogramBin>& bins) { return bins; }

json salient_words_to_api(const SalientWords& words) { return words; }

json behavioral_summary_to_api(const BehavioralSummary& s) {
  return {{"families", s.families}, {"tests", s.tests}};
}

json sweep_to_api(const std::vector<SweepPoint>& points) { return points; }

json action_to_api(const ProposedAction& a) {
  return {{"split", a.split},
          {"id", a.id},
          {"proposed_action", action_name(a.value)},
          {"updated_at", a.updated_at}};
}

}  // namespace errscope
