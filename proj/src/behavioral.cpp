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

#include "errscope/behavioral.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errscope/error.hpp"
#include "errscope/prng.hpp"
#include "errscope/syntax.hpp"

namespace errscope {

namespace {

constexpr std::string_view kEndingPunctuation = ".,!?;:";

bool is_ending_punctuation(char c) {
  return kEndingPunctuation.find(c) != std::string_view::npos;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view rstrip_space(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view rstrip_ending(std::string_view s) {
  while (!s.empty() && is_ending_punctuation(s.back())) s.remove_suffix(1);
  return s;
}

// Byte offsets of each code point start, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  while (pos < s.size()) {
    offsets.push_back(pos);
    const auto b = static_cast<unsigned char>(s[pos]);
    std::size_t len = 1;
    if ((b & 0xE0) == 0xC0) len = 2;
    else if ((b & 0xF0) == 0xE0) len = 3;
    else if ((b & 0xF8) == 0xF0) len = 4;
    pos = std::min(s.size(), pos + len);
  }
  offsets.push_back(s.size());
  return offsets;
}

void add_variant(std::vector<PerturbedVariant>& out, const Utterance& u,
                 std::string_view split, PerturbationFamily family, std::string test_name,
                 std::string text) {
  if (text == u.text) return;
  out.push_back({std::string(split), u.id, family, std::move(test_name), std::move(text)});
}

void punctuation_variants(const Utterance& u, std::string_view split,
                          std::vector<PerturbedVariant>& out) {
  const std::string_view base = rstrip_space(u.text);
  const std::string_view core = rstrip_ending(base);
  const bool has_ending = core.size() != base.size();
  constexpr auto kFamily = PerturbationFamily::kPunctuation;

  if (!has_ending && !base.empty()) {
    add_variant(out, u, split, kFamily, std::string(kEndingPeriodAdd), std::string(base) + ".");
  }
  if (!core.empty()) {
    add_variant(out, u, split, kFamily, std::string(kEndingQuestion), std::string(core) + "?");
  }
  if (has_ending && !core.empty()) {
    add_variant(out, u, split, kFamily, std::string(kEndingStrip), std::string(core));
  }
  const auto tokens = tokenize(u.text);
  std::vector<const TokenSpan*> words;
  for (const auto& t : tokens) {
    if (!is_punctuation_token(t.text)) words.push_back(&t);
  }
  if (words.size() >= 2) {
    const std::size_t at = words.front()->byte_end;
    if (at >= u.text.size() || !is_detachable_punctuation(u.text[at])) {
      std::string text = u.text;
      text.insert(at, ",");
      add_variant(out, u, split, kFamily, std::string(kInnerComma), std::move(text));
    }
  }
}

void typo_variants(const Utterance& u, std::string_view split, std::uint64_t seed,
                   int count, std::vector<PerturbedVariant>& out) {
  struct Candidate {
    std::size_t byte_start;
    std::vector<std::size_t> offsets;  // code point offsets relative to the text
  };
  std::vector<Candidate> candidates;
  for (const auto& t : tokenize(u.text)) {
    if (is_punctuation_token(t.text)) continue;
    auto offsets = code_point_offsets(t.text);
    if (offsets.size() - 1 < 4) continue;
    candidates.push_back({t.byte_start, std::move(offsets)});
  }
  if (candidates.empty()) return;
  for (int v = 0; v < count; ++v) {
    PerturbationStream rng(seed, static_cast<std::uint64_t>(u.id), static_cast<std::uint64_t>(v));
    const Candidate& word = candidates[rng.below(candidates.size())];
    const std::size_t length = word.offsets.size() - 1;
    // Swap interior code points i and i+1, with 1 <= i <= length - 3.
    const std::size_t i = 1 + rng.below(length - 3);
    const std::size_t a = word.byte_start + word.offsets[i];
    const std::size_t b = word.byte_start + word.offsets[i + 1];
    const std::size_t c = word.byte_start + word.offsets[i + 2];
    std::string text = u.text.substr(0, a);
    text.append(u.text, b, c - b);
    text.append(u.text, a, b - a);
    text.append(u.text, c, std::string::npos);
    add_variant(out, u, split, PerturbationFamily::kFuzzyMatching,
                std::string(kTypoSwapPrefix) + std::to_string(v), std::move(text));
  }
}

}  // namespace

std::string_view family_name(PerturbationFamily family) {
  return family == PerturbationFamily::kPunctuation ? "punctuation" : "fuzzy_matching";
}

std::optional<PerturbationFamily> parse_perturbation_family(std::string_view name) {
  if (name == "punctuation") return PerturbationFamily::kPunctuation;
  if (name == "fuzzy_matching") return PerturbationFamily::kFuzzyMatching;
  return std::nullopt;
}

std::vector<PerturbedVariant> generate_perturbations(const Utterance& utterance,
                                                     std::string_view split,
                                                     std::uint64_t seed, int typo_count) {
  std::vector<PerturbedVariant> out;
  if (utterance.text.empty()) return out;
  punctuation_variants(utterance, split, out);
  typo_variants(utterance, split, seed, typo_count, out);
  return out;
}

std::vector<InvarianceResult> evaluate_invariance(const Split& split,
                                                  const PredictionSet& original,
                                                  PredictionProvider& provider,
                                                  std::uint64_t seed,
                                                  const Thresholds& thresholds,
                                                  ClassIndex rejection_class) {
  if (original.size() != split.size()) {
    throw Error(ErrorCode::kRowCountMismatch,
                "evaluate_invariance: predictions do not match split '" + split.name + "'");
  }
  std::vector<PerturbedVariant> variants;
  for (const auto& u : split.utterances) {
    auto v = generate_perturbations(u, split.name, seed, thresholds.typo_variants);
    variants.insert(variants.end(), std::make_move_iterator(v.begin()),
                    std::make_move_iterator(v.end()));
  }
  for (auto& v : provider.extra_variants(split)) variants.push_back(std::move(v));

  std::vector<InvarianceResult> results;
  results.reserve(variants.size());
  for (std::size_t start = 0; start < variants.size(); start += kProviderBatchSize) {
    const std::size_t end = std::min(variants.size(), start + kProviderBatchSize);
    std::vector<PredictionRequest> batch;
    batch.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back({variants[i].id, variants[i].test_name, variants[i].perturbed_text});
    }
    const auto probs = provider.predict(batch);
    if (probs.size() != batch.size()) {
      throw Error(ErrorCode::kProviderUnavailable,
                  "provider returned " + std::to_string(probs.size()) + " rows for " +
                      std::to_string(batch.size()) + " texts");
    }
    for (std::size_t i = start; i < end; ++i) {
      const Eigen::VectorXd& p = probs[i - start];
      if (p.size() != original.class_count) {
        throw Error(ErrorCode::kProviderUnavailable,
                    "provider returned a vector of the wrong length for (" +
                        std::to_string(variants[i].id) + ", " + variants[i].test_name + ")");
      }
      const auto& before = original.post.predictions.at(static_cast<std::size_t>(variants[i].id));
      const PostprocessedPrediction after = postprocess(p, original.threshold, rejection_class);
      InvarianceResult r;
      r.original_class = before.top_class;
      r.perturbed_class = after.top_class;
      r.confidence_delta = after.top_confidence - before.top_confidence;
      r.passed = r.perturbed_class == r.original_class &&
                 std::abs(r.confidence_delta) <= thresholds.max_confidence_delta;
      r.variant = std::move(variants[i]);
      results.push_back(std::move(r));
    }
  }
  return results;
}

BehavioralSummary behavioral_tags_and_summary(std::span<const InvarianceResult> results,
                                              std::size_t split_size) {
  BehavioralSummary summary;
  summary.tags.assign(split_size, TagSet{});
  std::map<PerturbationFamily, FailureRate> families;
  std::map<std::string, FailureRate> tests;
  for (auto f : {PerturbationFamily::kPunctuation, PerturbationFamily::kFuzzyMatching}) {
    families[f] = {std::string(family_name(f)), f, 0, 0, 0.0};
  }
  for (const auto& r : results) {
    const auto& v = r.variant;
    auto& fam = families[v.family];
    auto& test = tests[v.test_name];
    test.name = v.test_name;
    test.family = v.family;
    ++fam.total;
    ++test.total;
    if (r.passed) continue;
    ++fam.failed;
    ++test.failed;
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= split_size) {
      throw Error(ErrorCode::kUnknownUtterance,
                  "behavioral result for unknown utterance " + std::to_string(v.id));
    }
    summary.tags[static_cast<std::size_t>(v.id)].insert(
        v.family == PerturbationFamily::kPunctuation ? SmartTag::kFailedPunctuation
                                                     : SmartTag::kFailedFuzzyMatching);
  }
  auto finish = [](FailureRate rate) {
    rate.failure_rate = rate.total == 0 ? 0.0
                                        : static_cast<double>(rate.failed) /
                                              static_cast<double>(rate.total);
    return rate;
  };
  for (auto& [_, f] : families) summary.families.push_back(finish(f));
  for (auto& [_, t] : tests) summary.tests.push_back(finish(t));
  return summary;
}

}  // namespace errscope
