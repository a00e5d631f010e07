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

#include "errscope/tagging.hpp"

#include <bit>

#include "errscope/error.hpp"
#include "errscope/syntax.hpp"

namespace errscope {

int TagSet::size() const { return std::popcount(bits_); }

std::vector<SmartTag> TagSet::tags() const {
  std::vector<SmartTag> out;
  for (const auto& info : kSmartTagRegistry) {
    if (contains(info.tag)) out.push_back(info.tag);
  }
  return out;
}

std::vector<std::string_view> TagSet::names() const {
  std::vector<std::string_view> out;
  for (const auto& info : kSmartTagRegistry) {
    if (contains(info.tag)) out.push_back(info.name);
  }
  return out;
}

TagSet TagSet::in_family(TagFamily family) const {
  TagSet out;
  for (const auto& info : kSmartTagRegistry) {
    if (info.family == family && contains(info.tag)) out.insert(info.tag);
  }
  return out;
}

std::string_view family_name(TagFamily family) {
  switch (family) {
    case TagFamily::kExtremeLength: return "extreme_length";
    case TagFamily::kPartialSyntax: return "partial_syntax";
    case TagFamily::kDissimilar: return "dissimilar";
    case TagFamily::kBehavioral: return "behavioral";
    case TagFamily::kAlmostCorrect: return "almost_correct";
    case TagFamily::kUncertain: return "uncertain";
    case TagFamily::kPipelineComparison: return "pipeline_comparison";
  }
  return "";
}

std::optional<SmartTag> parse_tag(std::string_view name) {
  for (const auto& info : kSmartTagRegistry) {
    if (info.name == name) return info.tag;
  }
  return std::nullopt;
}

namespace {

template <typename F>
void stage(const char* name, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

std::vector<TagSet> evaluate_tags(const TagInputs& in) {
  if (in.split == nullptr || in.predictions == nullptr) {
    throw Error(ErrorCode::kBadRequest, "evaluate_tags: split and predictions are required");
  }
  const Split& split = *in.split;
  const PredictionSet& preds = *in.predictions;
  const std::size_t n = split.size();
  if (preds.size() != n) {
    throw Error(ErrorCode::kRowCountMismatch,
                "evaluate_tags: predictions for " + preds.pipeline_id + "/" + split.name +
                    " have " + std::to_string(preds.size()) + " rows, split has " +
                    std::to_string(n));
  }
  std::vector<TagSet> tags(n);

  stage("syntax_analysis", [&] {
    for (std::size_t i = 0; i < n; ++i) {
      const SyntaxRow* row = in.syntax != nullptr ? &in.syntax->rows.at(i) : nullptr;
      tags[i] |= syntax_tags(split.utterances[i].text, row, in.thresholds);
    }
  });

  stage("similarity_analysis", [&] {
    auto check = [&](const NeighborTable* t) {
      if (t != nullptr && t->rows.size() != n) {
        throw Error(ErrorCode::kRowCountMismatch, "neighbor table does not match split");
      }
    };
    check(in.vs_train);
    check(in.vs_eval);
    for (std::size_t i = 0; i < n; ++i) {
      const ClassIndex label = split.utterances[i].label;
      if (in.vs_train != nullptr && in.train != nullptr) {
        tags[i] |= dissimilarity_tags(label, in.vs_train->rows[i], *in.train,
                                      SmartTag::kNoCloseTrain,
                                      SmartTag::kConflictingNeighborsTrain, in.thresholds);
      }
      if (in.vs_eval != nullptr && in.eval != nullptr) {
        tags[i] |= dissimilarity_tags(label, in.vs_eval->rows[i], *in.eval,
                                      SmartTag::kNoCloseEval,
                                      SmartTag::kConflictingNeighborsEval, in.thresholds);
      }
    }
  });

  stage("confidence_analysis", [&] {
    for (std::size_t i = 0; i < n; ++i) {
      tags[i] |= confidence_tags(split.utterances[i].label, preds.raw.predictions[i],
                                 preds.post.predictions[i], in.rejection_class);
    }
  });

  if (in.epistemic != nullptr) {
    stage("uncertainty_analysis", [&] {
      if (in.epistemic->size() != n) {
        throw Error(ErrorCode::kRowCountMismatch, "epistemic scores do not match split");
      }
      for (std::size_t i = 0; i < n; ++i) {
        tags[i] |= epistemic_tags((*in.epistemic)[i], in.thresholds.epistemic_threshold);
      }
    });
  }

  if (in.behavioral != nullptr) {
    stage("behavioral_testing", [&] {
      if (in.behavioral->tags.size() != n) {
        throw Error(ErrorCode::kRowCountMismatch, "behavioral tags do not match split");
      }
      for (std::size_t i = 0; i < n; ++i) tags[i] |= in.behavioral->tags[i];
    });
  }

  stage("pipeline_comparison", [&] {
    for (std::size_t i = 0; i < n; ++i) {
      tags[i] |= pipeline_comparison_tags(static_cast<std::int64_t>(i),
                                          split.utterances[i].label, in.pipelines);
    }
  });

  return tags;
}

}  // namespace errscope
