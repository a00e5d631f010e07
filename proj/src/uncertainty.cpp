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

#include "errscope/uncertainty.hpp"

namespace errscope {

TagSet confidence_tags(ClassIndex label, const PostprocessedPrediction& raw,
                       const PostprocessedPrediction& post, ClassIndex rejection_class) {
  TagSet tags;
  const auto& ranked = raw.ranked_classes;
  if (ranked.empty()) return tags;
  const std::size_t window = std::min<std::size_t>(3, ranked.size());
  for (std::size_t r = 1; r < window; ++r) {
    if (ranked[r] == label) tags.insert(SmartTag::kCorrectTop3);
  }
  if (ranked.front() == label && label != rejection_class &&
      post.top_class == rejection_class) {
    tags.insert(SmartTag::kCorrectLowConf);
  }
  return tags;
}

std::vector<EpistemicScore> epistemic_scores(const McSampleTable& table) {
  std::vector<EpistemicScore> out;
  const Eigen::Index n = table.samples == 0 ? 0 : table.values.rows() / table.samples;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(epistemic_score(table.utterance(i)));
  return out;
}

TagSet epistemic_tags(const EpistemicScore& score, double threshold) {
  TagSet tags;
  if (score.bald > threshold) tags.insert(SmartTag::kHighEpistemicUncertainty);
  return tags;
}

}  // namespace errscope
