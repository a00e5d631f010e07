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

#ifndef ERRSCOPE_COSINE_KNN_HPP_
#define ERRSCOPE_COSINE_KNN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "errscope/error.hpp"

namespace errscope {

struct Neighbor {
  std::int64_t id = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Orders by similarity descending, then id ascending.
inline bool neighbor_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

// Exact cosine top-k over a fixed set of row vectors. Rows are L2-normalized
// once at construction so a similarity is a dot product.
template <typename Scalar>
class CosineIndex {
 public:
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CosineIndex() = default;

  template <typename Derived>
  explicit CosineIndex(const Eigen::MatrixBase<Derived>& rows)
      : unit_(rows.template cast<Scalar>()) {
    for (Eigen::Index i = 0; i < unit_.rows(); ++i) {
      const Scalar norm = unit_.row(i).norm();
      if (!(norm > Scalar(0)) || !std::isfinite(static_cast<double>(norm))) {
        throw Error(ErrorCode::kZeroVector,
                    "embedding row " + std::to_string(i) + " is zero or not finite");
      }
      unit_.row(i) /= norm;
    }
  }

  Eigen::Index size() const { return unit_.rows(); }
  Eigen::Index dim() const { return unit_.cols(); }
  const RowMatrix& unit_rows() const { return unit_; }

  // Top-k neighbors of one query vector. `exclude` drops that row id
  // (the query itself when searching its own split).
  template <typename Derived>
  std::vector<Neighbor> query(const Eigen::MatrixBase<Derived>& vector, int k,
                              std::optional<std::int64_t> exclude = std::nullopt) const {
    if (vector.size() != dim()) {
      throw Error(ErrorCode::kBadRequest, "query dimension does not match the index");
    }
    Vector q = vector.template cast<Scalar>();
    const Scalar norm = q.norm();
    if (!(norm > Scalar(0))) throw Error(ErrorCode::kZeroVector, "query vector is zero");
    q /= norm;
    const Vector sims = unit_ * q;
    return select(sims, k, exclude);
  }

  // Top-k for every row of `queries` against this index, in row blocks to
  // bound memory. `same_set` excludes row i from query i's results.
  std::vector<std::vector<Neighbor>> query_all(const CosineIndex& queries, int k,
                                               bool same_set,
                                               Eigen::Index block = 256) const {
    if (queries.dim() != dim()) {
      throw Error(ErrorCode::kBadRequest, "query dimension does not match the index");
    }
    std::vector<std::vector<Neighbor>> out(static_cast<std::size_t>(queries.size()));
    for (Eigen::Index start = 0; start < queries.size(); start += block) {
      const Eigen::Index rows = std::min(block, queries.size() - start);
      const RowMatrix sims = queries.unit_.middleRows(start, rows) * unit_.transpose();
      for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index qi = start + r;
        out[static_cast<std::size_t>(qi)] =
            select(sims.row(r).transpose(), k,
                   same_set ? std::optional<std::int64_t>(qi) : std::nullopt);
      }
    }
    return out;
  }

 private:
  template <typename Derived>
  std::vector<Neighbor> select(const Eigen::MatrixBase<Derived>& sims, int k,
                               std::optional<std::int64_t> exclude) const {
    std::vector<Neighbor> all;
    all.reserve(static_cast<std::size_t>(sims.size()));
    for (Eigen::Index i = 0; i < sims.size(); ++i) {
      if (exclude && *exclude == i) continue;
      // Rounding can push a unit dot product a hair past +-1.
      const double s = std::clamp(static_cast<double>(sims(i)), -1.0, 1.0);
      all.push_back({static_cast<std::int64_t>(i), s});
    }
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      neighbor_before);
    all.resize(keep);
    return all;
  }

  RowMatrix unit_;
};

}  // namespace errscope

#endif  // ERRSCOPE_COSINE_KNN_HPP_
