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

#ifndef ERRSCOPE_SALIENCY_HPP_
#define ERRSCOPE_SALIENCY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "errscope/ingestion.hpp"
#include "errscope/prediction.hpp"

namespace errscope {

struct WordImportance {
  std::string word;
  double weight = 0.0;
  std::int64_t support = 0;

  friend bool operator==(const WordImportance&, const WordImportance&) = default;
};

struct SalientWords {
  std::vector<WordImportance> correct;
  std::vector<WordImportance> incorrect;
};

using StopwordSet = std::unordered_set<std::string>;

StopwordSet make_stopwords(const std::vector<std::string>& words);

// ASCII lowercase.
std::string fold_case(std::string_view word);

// Sums each token's saliency into its lowercased word's bucket, split by the
// utterance's outcome correctness at the chosen stage. Stopwords and
// punctuation-only tokens are dropped; returns the top `n` of each list by
// weight, ties by word.
SalientWords top_salient_words(std::span<const std::int64_t> population,
                               const SaliencyTable* saliency,
                               const PredictionSet& predictions, bool postprocessed,
                               const StopwordSet& stopwords, int n);

}  // namespace errscope

#endif  // ERRSCOPE_SALIENCY_HPP_
