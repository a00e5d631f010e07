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

#ifndef ERRSCOPE_UNCERTAINTY_HPP_
#define ERRSCOPE_UNCERTAINTY_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "errscope/error.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/prediction.hpp"
#include "errscope/smart_tags.hpp"

namespace errscope {

// Natural-log entropy with 0 ln 0 = 0.
template <typename Derived>
typename Derived::Scalar entropy(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar v = p(i);
    if (v > Scalar(0)) h -= v * std::log(v);
  }
  return h;
}

template <typename Scalar>
struct EpistemicScoreT {
  Scalar bald = 0;
  Scalar predictive_entropy = 0;
  int sample_count = 0;
};
using EpistemicScore = EpistemicScoreT<double>;

// BALD over M stochastic probability vectors (rows of `samples`):
// H(mean over samples) - mean over samples of H(sample).
template <typename Derived>
EpistemicScoreT<typename Derived::Scalar> epistemic_score(
    const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  if (samples.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "epistemic_score needs at least 2 samples, got " +
                    std::to_string(samples.rows()));
  }
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean = samples.colwise().mean();
  Scalar expected(0);
  for (Eigen::Index m = 0; m < samples.rows(); ++m) expected += entropy(samples.row(m));
  expected /= static_cast<Scalar>(samples.rows());
  EpistemicScoreT<Scalar> score;
  score.predictive_entropy = entropy(mean);
  // Mutual information is non-negative and bounded by the predictive
  // entropy; clamp the last-ulp rounding noise.
  score.bald = std::clamp(score.predictive_entropy - expected, Scalar(0),
                          score.predictive_entropy);
  score.sample_count = static_cast<int>(samples.rows());
  return score;
}

// correct_top_3: label ranked 2nd or 3rd. correct_low_conf: raw argmax is the
// label but thresholding rejected it.
TagSet confidence_tags(ClassIndex label, const PostprocessedPrediction& raw,
                       const PostprocessedPrediction& post, ClassIndex rejection_class);

std::vector<EpistemicScore> epistemic_scores(const McSampleTable& table);

TagSet epistemic_tags(const EpistemicScore& score, double threshold);

}  // namespace errscope

#endif  // ERRSCOPE_UNCERTAINTY_HPP_
