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

#ifndef ERRSCOPE_SMART_TAGS_HPP_
#define ERRSCOPE_SMART_TAGS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace errscope {

enum class SmartTag : std::uint8_t {
  kLongSentence,
  kShortSentence,
  kMissingSubject,
  kMissingVerb,
  kMissingObject,
  kNoCloseTrain,
  kNoCloseEval,
  kConflictingNeighborsTrain,
  kConflictingNeighborsEval,
  kFailedPunctuation,
  kFailedFuzzyMatching,
  kCorrectTop3,
  kCorrectLowConf,
  kHighEpistemicUncertainty,
  kIncorrectForAllPipelines,
  kPipelineDisagreement,
};
inline constexpr int kSmartTagCount = 16;

enum class TagFamily : std::uint8_t {
  kExtremeLength,
  kPartialSyntax,
  kDissimilar,
  kBehavioral,
  kAlmostCorrect,
  kUncertain,
  kPipelineComparison,
};
inline constexpr int kTagFamilyCount = 7;

struct SmartTagInfo {
  SmartTag tag;
  std::string_view name;
  TagFamily family;
};

inline constexpr std::array<SmartTagInfo, kSmartTagCount> kSmartTagRegistry = {{
    {SmartTag::kLongSentence, "long_sentence", TagFamily::kExtremeLength},
    {SmartTag::kShortSentence, "short_sentence", TagFamily::kExtremeLength},
    {SmartTag::kMissingSubject, "missing_subject", TagFamily::kPartialSyntax},
    {SmartTag::kMissingVerb, "missing_verb", TagFamily::kPartialSyntax},
    {SmartTag::kMissingObject, "missing_object", TagFamily::kPartialSyntax},
    {SmartTag::kNoCloseTrain, "no_close_train", TagFamily::kDissimilar},
    {SmartTag::kNoCloseEval, "no_close_eval", TagFamily::kDissimilar},
    {SmartTag::kConflictingNeighborsTrain, "conflicting_neighbors_train",
     TagFamily::kDissimilar},
    {SmartTag::kConflictingNeighborsEval, "conflicting_neighbors_eval",
     TagFamily::kDissimilar},
    {SmartTag::kFailedPunctuation, "failed_punctuation", TagFamily::kBehavioral},
    {SmartTag::kFailedFuzzyMatching, "failed_fuzzy_matching", TagFamily::kBehavioral},
    {SmartTag::kCorrectTop3, "correct_top_3", TagFamily::kAlmostCorrect},
    {SmartTag::kCorrectLowConf, "correct_low_conf", TagFamily::kAlmostCorrect},
    {SmartTag::kHighEpistemicUncertainty, "high_epistemic_uncertainty",
     TagFamily::kUncertain},
    {SmartTag::kIncorrectForAllPipelines, "incorrect_for_all_pipelines",
     TagFamily::kPipelineComparison},
    {SmartTag::kPipelineDisagreement, "pipeline_disagreement",
     TagFamily::kPipelineComparison},
}};

constexpr std::string_view tag_name(SmartTag tag) {
  return kSmartTagRegistry[static_cast<std::size_t>(tag)].name;
}
constexpr TagFamily tag_family(SmartTag tag) {
  return kSmartTagRegistry[static_cast<std::size_t>(tag)].family;
}
std::string_view family_name(TagFamily family);
std::optional<SmartTag> parse_tag(std::string_view name);

// Bit set over the closed registry.
class TagSet {
 public:
  constexpr TagSet() = default;
  constexpr TagSet(std::initializer_list<SmartTag> tags) {
    for (SmartTag t : tags) insert(t);
  }
  static constexpr TagSet from_bits(std::uint32_t bits) {
    TagSet s;
    s.bits_ = bits & ((1U << kSmartTagCount) - 1);
    return s;
  }

  constexpr void insert(SmartTag t) { bits_ |= bit(t); }
  constexpr void erase(SmartTag t) { bits_ &= ~bit(t); }
  constexpr bool contains(SmartTag t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool intersects(TagSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr std::uint32_t bits() const { return bits_; }
  int size() const;
  std::vector<SmartTag> tags() const;
  std::vector<std::string_view> names() const;
  // Members of this set that belong to `family`.
  TagSet in_family(TagFamily family) const;

  constexpr TagSet& operator|=(TagSet other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend constexpr TagSet operator|(TagSet a, TagSet b) { return a |= b; }
  friend constexpr bool operator==(TagSet, TagSet) = default;

 private:
  static constexpr std::uint32_t bit(SmartTag t) {
    return 1U << static_cast<unsigned>(t);
  }
  std::uint32_t bits_ = 0;
};

}  // namespace errscope

#endif  // ERRSCOPE_SMART_TAGS_HPP_
