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

#include "errscope/saliency.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "errscope/error.hpp"

namespace errscope {

namespace {

bool is_punctuation_only(std::string_view token) {
  return std::all_of(token.begin(), token.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

struct Bucket {
  double weight = 0.0;
  std::int64_t support = 0;
  std::int64_t last_utterance = -1;
};

std::vector<WordImportance> top_n(const std::map<std::string, Bucket>& buckets, int n) {
  std::vector<WordImportance> words;
  words.reserve(buckets.size());
  for (const auto& [word, b] : buckets) words.push_back({word, b.weight, b.support});
  const auto keep = std::min(words.size(), static_cast<std::size_t>(n));
  std::partial_sort(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(keep),
                    words.end(), [](const WordImportance& a, const WordImportance& b) {
                      if (a.weight != b.weight) return a.weight > b.weight;
                      return a.word < b.word;
                    });
  words.resize(keep);
  return words;
}

}  // namespace

StopwordSet make_stopwords(const std::vector<std::string>& words) {
  StopwordSet set;
  for (const auto& w : words) set.insert(fold_case(w));
  return set;
}

std::string fold_case(std::string_view word) {
  std::string out(word);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

SalientWords top_salient_words(std::span<const std::int64_t> population,
                               const SaliencyTable* saliency,
                               const PredictionSet& predictions, bool postprocessed,
                               const StopwordSet& stopwords, int n) {
  if (saliency == nullptr) {
    throw Error(ErrorCode::kMissingSaliency,
                "no saliency table for pipeline '" + predictions.pipeline_id + "' on split '" +
                    predictions.split + "'");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidRange, "top_salient_words: n must be >= 1");
  const StagePredictions& stage = predictions.stage(postprocessed);
  // Sum in ascending id order so weights do not depend on population order.
  std::vector<std::int64_t> ids(population.begin(), population.end());
  std::sort(ids.begin(), ids.end());
  std::map<std::string, Bucket> correct;
  std::map<std::string, Bucket> incorrect;
  for (auto id : ids) {
    const auto i = static_cast<std::size_t>(id);
    if (i >= saliency->rows.size()) {
      throw Error(ErrorCode::kUnknownUtterance,
                  "saliency table has no row for utterance " + std::to_string(id));
    }
    auto& target = is_correct(stage.outcomes.at(i)) ? correct : incorrect;
    const SaliencyRow& row = saliency->rows[i];
    for (std::size_t t = 0; t < row.tokens.size(); ++t) {
      if (row.tokens[t].empty() || is_punctuation_only(row.tokens[t])) continue;
      std::string word = fold_case(row.tokens[t]);
      if (stopwords.contains(word)) continue;
      Bucket& b = target[std::move(word)];
      b.weight += row.scores[t];
      if (b.last_utterance != id) {
        ++b.support;
        b.last_utterance = id;
      }
    }
  }
  return {top_n(correct, n), top_n(incorrect, n)};
}

}  // namespace errscope
