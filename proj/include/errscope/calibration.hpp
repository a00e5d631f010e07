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

#ifndef ERRSCOPE_CALIBRATION_HPP_
#define ERRSCOPE_CALIBRATION_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "errscope/error.hpp"

namespace errscope {

// Bin of `confidence` among `bins` equal-width, right-closed bins over
// [0, 1]: bin b covers (b/bins, (b+1)/bins], and 0 falls in bin 0. Edges are
// compared as the doubles b/bins so that e.g. 0.3 lands in (0.2, 0.3].
template <typename Scalar>
int right_closed_bin(Scalar confidence, int bins) {
  const double c = static_cast<double>(confidence);
  int b = static_cast<int>(std::ceil(c * bins)) - 1;
  b = std::clamp(b, 0, bins - 1);
  while (b > 0 && c <= static_cast<double>(b) / bins) --b;
  while (b < bins - 1 && c > static_cast<double>(b + 1) / bins) ++b;
  return b;
}

// Left-closed variant, [b/bins, (b+1)/bins), with 1.0 in the last bin.
template <typename Scalar>
int left_closed_bin(Scalar confidence, int bins) {
  const double c = static_cast<double>(confidence);
  int b = static_cast<int>(std::floor(c * bins));
  b = std::clamp(b, 0, bins - 1);
  while (b > 0 && c < static_cast<double>(b) / bins) --b;
  while (b < bins - 1 && c >= static_cast<double>(b + 1) / bins) ++b;
  return b;
}

// Sum over bins of (n_b / N) * |accuracy_b - mean_confidence_b|. `correct`
// holds 1 for a correct top-1 prediction and 0 otherwise.
template <typename ConfDerived, typename CorrectDerived>
typename ConfDerived::Scalar expected_calibration_error(
    const Eigen::DenseBase<ConfDerived>& confidence,
    const Eigen::DenseBase<CorrectDerived>& correct, int bins) {
  using Scalar = typename ConfDerived::Scalar;
  if (confidence.size() == 0) {
    throw Error(ErrorCode::kEmptyInput, "expected_calibration_error: no predictions");
  }
  if (confidence.size() != correct.size()) {
    throw Error(ErrorCode::kBadRequest,
                "expected_calibration_error: confidence/correctness size mismatch");
  }
  if (bins < 1) {
    throw Error(ErrorCode::kInvalidThreshold, "expected_calibration_error: bins < 1");
  }
  std::vector<Scalar> conf_sum(bins, Scalar(0));
  std::vector<Scalar> hit_sum(bins, Scalar(0));
  std::vector<Eigen::Index> count(bins, 0);
  for (Eigen::Index i = 0; i < confidence.size(); ++i) {
    const Scalar c = confidence(i);
    if (!(c >= Scalar(0) && c <= Scalar(1))) {
      throw Error(ErrorCode::kInvalidRange,
                  "expected_calibration_error: confidence outside [0, 1]");
    }
    const int b = right_closed_bin(c, bins);
    conf_sum[b] += c;
    hit_sum[b] += static_cast<Scalar>(correct(i));
    ++count[b];
  }
  const auto total = static_cast<Scalar>(confidence.size());
  Scalar ece(0);
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const auto n = static_cast<Scalar>(count[b]);
    ece += (n / total) * std::abs(hit_sum[b] / n - conf_sum[b] / n);
  }
  return ece;
}

}  // namespace errscope

#endif  // ERRSCOPE_CALIBRATION_HPP_
