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

#ifndef ERRSCOPE_BEHAVIORAL_HPP_
#define ERRSCOPE_BEHAVIORAL_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "errscope/config.hpp"
#include "errscope/ingestion.hpp"
#include "errscope/prediction.hpp"
#include "errscope/smart_tags.hpp"

namespace errscope {

enum class PerturbationFamily : std::uint8_t { kPunctuation, kFuzzyMatching };

std::string_view family_name(PerturbationFamily family);
std::optional<PerturbationFamily> parse_perturbation_family(std::string_view name);

// Fixed test registry. Typo tests are numbered: typo_swap_0, typo_swap_1, ...
inline constexpr std::string_view kEndingPeriodAdd = "ending_period_add";
inline constexpr std::string_view kEndingQuestion = "ending_question";
inline constexpr std::string_view kEndingStrip = "ending_strip";
inline constexpr std::string_view kInnerComma = "inner_comma";
inline constexpr std::string_view kTypoSwapPrefix = "typo_swap_";

struct PerturbedVariant {
  std::string split;
  std::int64_t id = 0;
  PerturbationFamily family = PerturbationFamily::kPunctuation;
  std::string test_name;
  std::string perturbed_text;

  friend bool operator==(const PerturbedVariant&, const PerturbedVariant&) = default;
};

// Punctuation variants (deterministic) followed by `typo_variants` seeded
// adjacent-character swaps. Variants whose precondition fails, or whose text
// would equal the source, are skipped.
std::vector<PerturbedVariant> generate_perturbations(const Utterance& utterance,
                                                     std::string_view split,
                                                     std::uint64_t seed, int typo_variants);

struct PredictionRequest {
  std::int64_t id = 0;
  std::string_view test_name;
  std::string_view text;
};

// Supplies class-probability vectors for perturbed texts.
class PredictionProvider {
 public:
  virtual ~PredictionProvider() = default;
  // One probability vector per request, in order.
  virtual std::vector<Eigen::VectorXd> predict(std::span<const PredictionRequest> batch) = 0;
  // User-defined variants known only to the provider (file mode).
  virtual std::vector<PerturbedVariant> extra_variants(const Split& /*split*/) { return {}; }
};

struct InvarianceResult {
  PerturbedVariant variant;
  ClassIndex original_class = 0;
  ClassIndex perturbed_class = 0;
  // Perturbed minus original raw top confidence.
  double confidence_delta = 0.0;
  bool passed = true;
};

inline constexpr std::size_t kProviderBatchSize = 64;

// Runs every generated variant of the split through `provider` and compares
// post-processed classes against the original predictions.
std::vector<InvarianceResult> evaluate_invariance(const Split& split,
                                                  const PredictionSet& original,
                                                  PredictionProvider& provider,
                                                  std::uint64_t seed,
                                                  const Thresholds& thresholds,
                                                  ClassIndex rejection_class);

struct FailureRate {
  std::string name;  // family or test name
  PerturbationFamily family = PerturbationFamily::kPunctuation;
  std::int64_t total = 0;
  std::int64_t failed = 0;
  double failure_rate = 0.0;
};

struct BehavioralSummary {
  // Aligned with the split.
  std::vector<TagSet> tags;
  std::vector<FailureRate> families;
  std::vector<FailureRate> tests;
};

BehavioralSummary behavioral_tags_and_summary(std::span<const InvarianceResult> results,
                                              std::size_t split_size);

}  // namespace errscope

#endif  // ERRSCOPE_BEHAVIORAL_HPP_
