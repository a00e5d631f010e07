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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "errscope/cosine_knn.hpp"
#include "errscope/similarity.hpp"
#include "support/fixture.hpp"

namespace errscope {
namespace {

using testing::thrown_error;

EmbeddingMatrix embedding(const std::string& split, const Eigen::MatrixXf& m) {
  EmbeddingMatrix e;
  e.split = split;
  e.rows = m;
  return e;
}

// Exhaustive scan: cosine in long double, full sort by (similarity desc, id asc).
std::vector<std::vector<std::pair<std::int64_t, long double>>> oracle(
    const Eigen::MatrixXf& q, const Eigen::MatrixXf& t, int k, bool same) {
  std::vector<std::vector<std::pair<std::int64_t, long double>>> out(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    std::vector<std::pair<std::int64_t, long double>> all;
    for (Eigen::Index j = 0; j < t.rows(); ++j) {
      if (same && i == j) continue;
      long double dot = 0, nq = 0, nt = 0;
      for (Eigen::Index d = 0; d < q.cols(); ++d) {
        dot += static_cast<long double>(q(i, d)) * t(j, d);
        nq += static_cast<long double>(q(i, d)) * q(i, d);
        nt += static_cast<long double>(t(j, d)) * t(j, d);
      }
      all.push_back({j, dot / std::sqrt(nq * nt)});
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(k)));
    out[i] = all;
  }
  return out;
}

TEST(NearestNeighbors, QueryEqualToStoredVector) {
  Eigen::MatrixXf t(3, 3);
  t << 1, 2, 3, -1, 0, 2, 0.5f, 0.5f, 0;
  const auto target = embedding("train", t);
  Eigen::VectorXd q(3);
  q << 1, 2, 3;
  const auto list = nearest_neighbors(q, &target, 2);
  ASSERT_EQ(list.neighbors.size(), 2u);
  EXPECT_EQ(list.neighbors[0].id, 0);
  EXPECT_NEAR(list.neighbors[0].similarity, 1.0, 1e-6);
}

TEST(NearestNeighbors, OrthogonalVectors) {
  Eigen::MatrixXf t(1, 2);
  t << 0, 1;
  const auto target = embedding("train", t);
  Eigen::VectorXd q(2);
  q << 1, 0;
  const auto list = nearest_neighbors(q, &target, 5);
  ASSERT_EQ(list.neighbors.size(), 1u);
  EXPECT_EQ(list.neighbors[0].similarity, 0.0);
}

TEST(NearestNeighbors, Errors) {
  Eigen::VectorXd q = Eigen::VectorXd::Ones(2);
  EXPECT_EQ(thrown_error([&] { nearest_neighbors(q, nullptr, 5); })->code(),
            ErrorCode::kMissingEmbeddings);
  Eigen::MatrixXf t(2, 2);
  t << 1, 0, 0, 0;
  const auto target = embedding("train", t);
  EXPECT_EQ(thrown_error([&] { nearest_neighbors(q, &target, 5); })->code(),
            ErrorCode::kZeroVector);
  Eigen::MatrixXf ok = Eigen::MatrixXf::Ones(2, 2);
  const auto good = embedding("train", ok);
  EXPECT_EQ(thrown_error([&] { nearest_neighbors(q, &good, 0); })->code(),
            ErrorCode::kInvalidRange);
  EXPECT_EQ(thrown_error([&] { nearest_neighbors(Eigen::VectorXd::Zero(2), &good, 1); })->code(),
            ErrorCode::kZeroVector);
}

TEST(NeighborTable, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(17);
  std::normal_distribution<float> g(0.0f, 1.0f);
  auto random = [&](int n, int d) {
    Eigen::MatrixXf m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    }
    return m;
  };
  const Eigen::MatrixXf train = random(300, 16);
  const Eigen::MatrixXf eval = random(120, 16);
  const auto et = embedding("train", train);
  const auto ee = embedding("eval", eval);
  for (auto [q, t, qm, tm] : {std::tuple{&ee, &et, &eval, &train}, std::tuple{&et, &et, &train, &train},
                              std::tuple{&ee, &ee, &eval, &eval}}) {
    const bool same = q == t;
    const auto table = compute_neighbor_table(q, t, 20);
    const auto expected = oracle(*qm, *tm, 20, same);
    ASSERT_EQ(table.rows.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      ASSERT_EQ(table.rows[i].size(), expected[i].size());
      for (std::size_t r = 0; r < expected[i].size(); ++r) {
        EXPECT_EQ(table.rows[i][r].id, expected[i][r].first) << i << "/" << r;
        EXPECT_NEAR(table.rows[i][r].similarity, static_cast<double>(expected[i][r].second),
                    1e-12);
      }
      if (same) {
        for (const auto& n : table.rows[i]) EXPECT_NE(n.id, static_cast<std::int64_t>(i));
      }
    }
  }
}

TEST(NeighborTable, KLargerThanTarget) {
  Eigen::MatrixXf m(3, 2);
  m << 1, 0, 0, 1, 1, 1;
  const auto e = embedding("eval", m);
  const auto table = compute_neighbor_table(&e, &e, 20);
  for (const auto& row : table.rows) EXPECT_EQ(row.size(), 2u);
}

TEST(CosineIndex, ScaleInvariance) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  Eigen::MatrixXd m(200, 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = g(rng);
  }
  Eigen::MatrixXd scaled = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) scaled.row(i) *= scale(rng);
  const CosineIndex<double> a(m), b(scaled);
  const auto ra = a.query_all(a, 10, true, 64);
  const auto rb = b.query_all(b, 10, true, 64);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    for (std::size_t r = 0; r < ra[i].size(); ++r) {
      EXPECT_EQ(ra[i][r].id, rb[i][r].id);
      EXPECT_NEAR(ra[i][r].similarity, rb[i][r].similarity, 1e-12);
    }
  }
}

// Eigen picks a different product kernel for a one-row block, so scores may
// differ in the last bit; the ranking must not.
TEST(CosineIndex, BlockSizeDoesNotChangeRanking) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(70, 5);
  const CosineIndex<double> idx(m);
  const auto reference = idx.query_all(idx, 7, true, 256);
  for (Eigen::Index block : {1, 13, 70}) {
    const auto other = idx.query_all(idx, 7, true, block);
    for (std::size_t i = 0; i < reference.size(); ++i) {
      for (std::size_t r = 0; r < reference[i].size(); ++r) {
        EXPECT_EQ(other[i][r].id, reference[i][r].id) << block;
        EXPECT_NEAR(other[i][r].similarity, reference[i][r].similarity, 1e-15);
      }
    }
  }
}

TEST(CosineIndex, TiesBreakByAscendingId) {
  Eigen::MatrixXd m(4, 2);
  m << 2, 0, 1, 0, 0, 1, 3, 0;
  const CosineIndex<double> idx(m);
  Eigen::Vector2d q(1, 0);
  const auto res = idx.query(q, 4);
  ASSERT_EQ(res.size(), 4u);
  EXPECT_EQ(res[0].id, 0);
  EXPECT_EQ(res[1].id, 1);
  EXPECT_EQ(res[2].id, 3);
  EXPECT_EQ(res[3].id, 2);
}

TEST(CosineIndex, FloatScalar) {
  Eigen::MatrixXf m(3, 2);
  m << 1, 0, 0, 1, 1, 1;
  const CosineIndex<float> idx(m);
  Eigen::Vector2f q(1, 0.1f);
  EXPECT_EQ(idx.query(q, 1)[0].id, 0);
}

}  // namespace
}  // namespace errscope
