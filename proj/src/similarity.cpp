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

#include "errscope/similarity.hpp"

#include "errscope/error.hpp"

namespace errscope {

namespace {

const EmbeddingMatrix& require(const EmbeddingMatrix* e, const char* role) {
  if (e == nullptr) {
    throw Error(ErrorCode::kMissingEmbeddings, std::string("no embeddings for ") + role);
  }
  return *e;
}

}  // namespace

CosineIndex<double> build_index(const EmbeddingMatrix& embeddings) {
  try {
    return CosineIndex<double>(embeddings.rows);
  } catch (const Error& e) {
    throw Error(e.code(), "split '" + embeddings.split + "': " + e.what());
  }
}

NeighborList nearest_neighbors(const Eigen::Ref<const Eigen::VectorXd>& query,
                               const EmbeddingMatrix* target, int k,
                               std::optional<std::int64_t> exclude) {
  const EmbeddingMatrix& t = require(target, "target split");
  if (k < 1) throw Error(ErrorCode::kInvalidRange, "nearest_neighbors: k must be >= 1");
  NeighborList out;
  out.target_split = t.split;
  out.neighbors = build_index(t).query(query, k, exclude);
  return out;
}

NeighborTable compute_neighbor_table(const EmbeddingMatrix* query,
                                     const EmbeddingMatrix* target, int k) {
  const EmbeddingMatrix& q = require(query, "query split");
  const EmbeddingMatrix& t = require(target, "target split");
  NeighborTable table;
  table.query_split = q.split;
  table.target_split = t.split;
  table.k = k;
  const CosineIndex<double> target_index = build_index(t);
  if (q.split == t.split) {
    table.rows = target_index.query_all(target_index, k, /*same_set=*/true);
  } else {
    table.rows = target_index.query_all(build_index(q), k, /*same_set=*/false);
  }
  return table;
}

TagSet dissimilarity_tags(ClassIndex label, const std::vector<Neighbor>& neighbors,
                          const Split& target, SmartTag no_close, SmartTag conflicting,
                          const Thresholds& thresholds) {
  TagSet tags;
  if (neighbors.empty()) return tags;
  if (neighbors.front().similarity < thresholds.no_close_similarity) tags.insert(no_close);
  const std::size_t considered =
      std::min(neighbors.size(), static_cast<std::size_t>(thresholds.neighbor_count));
  std::size_t same = 0;
  for (std::size_t i = 0; i < considered; ++i) {
    if (target.at(neighbors[i].id).label == label) ++same;
  }
  const double fraction = static_cast<double>(same) / static_cast<double>(considered);
  if (fraction < thresholds.same_label_fraction) tags.insert(conflicting);
  return tags;
}

TagSet similarity_tags(ClassIndex label, const std::vector<Neighbor>* vs_train,
                       const Split& train, const std::vector<Neighbor>* vs_eval,
                       const Split& eval, const Thresholds& thresholds) {
  if (vs_train == nullptr || vs_eval == nullptr) {
    throw Error(ErrorCode::kMissingEmbeddings,
                "similarity tags need neighbor lists against train and eval");
  }
  return dissimilarity_tags(label, *vs_train, train, SmartTag::kNoCloseTrain,
                            SmartTag::kConflictingNeighborsTrain, thresholds) |
         dissimilarity_tags(label, *vs_eval, eval, SmartTag::kNoCloseEval,
                            SmartTag::kConflictingNeighborsEval, thresholds);
}

}  // namespace errscope
