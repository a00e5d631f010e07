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

#ifndef ERRSCOPE_SIMILARITY_HPP_
#define ERRSCOPE_SIMILARITY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "errscope/config.hpp"
#include "errscope/cosine_knn.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/smart_tags.hpp"

namespace errscope {

struct NeighborList {
  std::string query_split;
  std::int64_t query_id = -1;  // -1 for free-standing query vectors
  std::string target_split;
  std::vector<Neighbor> neighbors;
};

// Neighbor lists of every utterance in `query_split` against `target_split`.
struct NeighborTable {
  std::string query_split;
  std::string target_split;
  int k = 0;
  std::vector<std::vector<Neighbor>> rows;
};

CosineIndex<double> build_index(const EmbeddingMatrix& embeddings);

// Exact top-k of `query` within the target split. Pass the query's own id as
// `exclude` when it belongs to the target split.
NeighborList nearest_neighbors(const Eigen::Ref<const Eigen::VectorXd>& query,
                               const EmbeddingMatrix* target, int k,
                               std::optional<std::int64_t> exclude = std::nullopt);

NeighborTable compute_neighbor_table(const EmbeddingMatrix* query,
                                     const EmbeddingMatrix* target, int k);

// Tags against one target split: `no_close` when the best neighbor is below
// no_close_similarity, `conflicting` when the share of neighbors carrying
// `label` is below same_label_fraction. An empty neighbor list tags nothing.
TagSet dissimilarity_tags(ClassIndex label, const std::vector<Neighbor>& neighbors,
                          const Split& target, SmartTag no_close, SmartTag conflicting,
                          const Thresholds& thresholds);

// Both splits at once; null neighbor lists raise MissingEmbeddings.
TagSet similarity_tags(ClassIndex label, const std::vector<Neighbor>* vs_train,
                       const Split& train, const std::vector<Neighbor>* vs_eval,
                       const Split& eval, const Thresholds& thresholds);

}  // namespace errscope

#endif  // ERRSCOPE_SIMILARITY_HPP_
