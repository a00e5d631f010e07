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

#ifndef ERRSCOPE_TAGGING_HPP_
#define ERRSCOPE_TAGGING_HPP_

#include <span>
#include <vector>

#include "errscope/behavioral.hpp"
#include "errscope/config.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/prediction.hpp"
#include "errscope/similarity.hpp"
#include "errscope/smart_tags.hpp"
#include "errscope/uncertainty.hpp"

namespace errscope {

// Everything the tag evaluators read for one (split, pipeline). Optional
// inputs are null when the artifact behind them is not configured; the
// corresponding tags are then never assigned.
struct TagInputs {
  const Split* split = nullptr;
  const PredictionSet* predictions = nullptr;
  ClassIndex rejection_class = 0;
  Thresholds thresholds;

  const SyntaxTable* syntax = nullptr;
  const Split* train = nullptr;
  const NeighborTable* vs_train = nullptr;
  const Split* eval = nullptr;
  const NeighborTable* vs_eval = nullptr;
  const std::vector<EpistemicScore>* epistemic = nullptr;
  const BehavioralSummary* behavioral = nullptr;
  // Every pipeline with predictions for the split, the current one included.
  std::vector<const PredictionSet*> pipelines;
};

// Union of all tag evaluators, aligned with the split. Errors from an
// evaluator are re-raised with its name prefixed.
std::vector<TagSet> evaluate_tags(const TagInputs& inputs);

}  // namespace errscope

#endif  // ERRSCOPE_TAGGING_HPP_
