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

#ifndef ERRSCOPE_TESTS_SUPPORT_FILTER_ORACLE_HPP_
#define ERRSCOPE_TESTS_SUPPORT_FILTER_ORACLE_HPP_

#include <algorithm>
#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "errscope/action_store.hpp"
#include "errscope/query.hpp"
#include "support/fixture.hpp"

namespace errscope::testing {

inline const std::vector<std::string> kWords = {"Card", "refund", "PIN", "transfer", "limit", "fee"};

// Random split with 4 classes (rejection = 4), random tags and actions.
struct RandomTable {
  explicit RandomTable(std::uint64_t seed, int n = 400) : rng(seed) {
    split.name = "eval";
    std::uniform_int_distribution<int> label(0, 4), word(0, 5), len(1, 5), bit(0, 3);
    for (int i = 0; i < n; ++i) {
      std::string text;
      for (int w = len(rng); w > 0; --w) text += kWords[word(rng)] + " ";
      split.utterances.push_back({i, text, label(rng)});
    }
    PredictionTable t;
    t.probs = random_probs(rng, n, 4);
    preds = predict_split(split, t, 0.45, 4);
    tags.resize(n);
    for (auto& tag : tags) {
      for (int k = 0; k < kSmartTagCount; ++k) {
        if (bit(rng) == 0) tag.insert(static_cast<SmartTag>(k));
      }
    }
    std::uniform_int_distribution<int> act(0, kActionValueCount - 1);
    for (int i = 0; i < n; ++i) actions.push_back(static_cast<ActionValue>(act(rng) % 3));
    table = build_query_table(split, preds, tags, {"b", "a", "d", "c", "oos"});
  }

  FilterSpec random_spec() {
    std::uniform_int_distribution<int> coin(0, 2), cls(0, 4), tag(0, kSmartTagCount - 1),
        out(0, 3), act(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FilterSpec s;
    if (coin(rng) == 0) s.labels = {cls(rng), cls(rng)};
    if (coin(rng) == 0) s.predictions = {cls(rng)};
    if (coin(rng) == 0) s.outcomes = {static_cast<Outcome>(out(rng))};
    if (coin(rng) == 0) {
      s.smart_tags.insert(static_cast<SmartTag>(tag(rng)));
      s.smart_tags.insert(static_cast<SmartTag>(tag(rng)));
    }
    if (coin(rng) == 0) s.data_actions = {static_cast<ActionValue>(act(rng))};
    if (coin(rng) == 0) {
      double a = u(rng), b = u(rng);
      s.confidence_min = std::min(a, b);
      s.confidence_max = std::max(a, b);
    }
    if (coin(rng) == 0) s.text_contains = coin(rng) == 0 ? "card" : "PIN tr";
    s.postprocessed = coin(rng) != 0;
    return s;
  }

  std::mt19937_64 rng;
  Split split;
  PredictionSet preds;
  std::vector<TagSet> tags;
  std::vector<ActionValue> actions;
  QueryTable table;
};

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Straightforward re-statement of the facet semantics over the raw inputs.
inline std::vector<std::int64_t> naive(const RandomTable& t, const FilterSpec& s) {
  std::vector<std::int64_t> ids;
  const auto& stage = t.preds.stage(s.postprocessed);
  for (std::size_t i = 0; i < t.split.size(); ++i) {
    const auto& u = t.split.utterances[i];
    const auto& p = stage.predictions[i];
    if (!s.labels.empty() && !s.labels.count(u.label)) continue;
    if (!s.predictions.empty() && !s.predictions.count(p.top_class)) continue;
    if (!s.outcomes.empty() && !s.outcomes.count(stage.outcomes[i])) continue;
    if (!s.data_actions.empty() && !s.data_actions.count(t.actions[i])) continue;
    const double conf = t.preds.raw.predictions[i].top_confidence;
    if (conf < s.confidence_min || conf > s.confidence_max) continue;
    bool tag_ok = true;
    for (int f = 0; f < kTagFamilyCount; ++f) {
      bool wanted = false, hit = false;
      for (SmartTag tag : s.smart_tags.tags()) {
        if (static_cast<int>(tag_family(tag)) != f) continue;
        wanted = true;
        hit = hit || t.tags[i].contains(tag);
      }
      if (wanted && !hit) tag_ok = false;
    }
    if (!tag_ok) continue;
    if (lower(u.text).find(lower(s.text_contains)) == std::string::npos) continue;
    ids.push_back(u.id);
  }
  return ids;
}

}  // namespace errscope::testing

#endif  // ERRSCOPE_TESTS_SUPPORT_FILTER_ORACLE_HPP_
