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

#ifndef ERRSCOPE_TESTS_SUPPORT_DEMO_PROJECT_HPP_
#define ERRSCOPE_TESTS_SUPPORT_DEMO_PROJECT_HPP_

// A complete synthetic project: train and eval splits, embeddings, syntax,
// two pipelines, saliency, MC samples and file-backed perturbed predictions.

#include <random>
#include <string>
#include <vector>

#include "errscope/behavioral.hpp"
#include "support/fixture.hpp"

namespace errscope::testing {

inline const std::vector<std::string>& demo_classes() {
  static const std::vector<std::string> classes = {"balance", "card_lost", "transfer"};
  return classes;
}

inline const std::vector<std::vector<std::string>>& demo_vocab() {
  static const std::vector<std::vector<std::string>> vocab = {
      {"balance", "account", "money", "check", "savings"},
      {"card", "lost", "stolen", "block", "wallet"},
      {"transfer", "send", "wire", "payment", "friend"}};
  return vocab;
}

struct DemoOptions {
  int train = 60;
  int eval = 40;
  std::uint64_t seed = 3;
  bool perturbed = true;  // write a perturbed-predictions file for base/eval
};

inline ProjectData demo_project(const DemoOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<float> noise(0.0f, 0.3f);
  const auto& vocab = demo_vocab();
  const int c = static_cast<int>(demo_classes().size());

  ProjectData p;
  p.name = "demo";
  p.classes = demo_classes();
  PipelineData base, alt;
  base.id = "base";
  alt.id = "alt";
  alt.threshold = 0.6;

  for (const auto& [name, n] : {std::pair<std::string, int>{"train", opt.train},
                                std::pair<std::string, int>{"eval", opt.eval}}) {
    SplitData s;
    Eigen::MatrixXf emb(n, 8);
    Eigen::MatrixXd probs(n, c), alt_probs(n, c);
    std::vector<json> syntax;
    std::vector<std::pair<std::vector<std::string>, std::vector<double>>> saliency;
    Eigen::MatrixXd mc(n * 4, c);
    for (int i = 0; i < n; ++i) {
      // every 7th eval utterance is out of scope
      const bool oos = name == "eval" && i % 7 == 6;
      const int label = oos ? c : i % c;
      const int topic = oos ? static_cast<int>(u(rng) * c) % c : label;
      const int words = 1 + static_cast<int>(u(rng) * 18);
      std::string text;
      std::vector<std::string> tokens;
      for (int w = 0; w < words; ++w) {
        const auto& pool = u(rng) < 0.8 ? vocab[topic] : vocab[(topic + 1) % c];
        tokens.push_back(pool[static_cast<std::size_t>(u(rng) * pool.size()) % pool.size()]);
        text += (w ? " " : "") + tokens.back();
      }
      s.texts.push_back(text);
      s.labels.push_back(oos ? p.rejection : p.classes[label]);

      for (int d = 0; d < 8; ++d) emb(i, d) = (d % c == topic ? 1.0f : 0.0f) + noise(rng);

      const int guess = u(rng) < 0.8 ? topic : (topic + 1) % c;
      const double conf = 0.35 + 0.6 * u(rng);
      probs.row(i) = peaked(c, guess, conf);
      alt_probs.row(i) = peaked(c, u(rng) < 0.85 ? topic : (topic + 2) % c, 0.4 + 0.5 * u(rng));

      syntax.push_back({{"has_subject", u(rng) < 0.9},
                        {"has_verb", u(rng) < 0.8},
                        {"has_object", u(rng) < 0.85}});
      std::vector<double> scores;
      double total = 0;
      for (std::size_t t = 0; t < tokens.size(); ++t) total += scores.emplace_back(u(rng) + 0.01);
      for (auto& x : scores) x /= total;
      saliency.emplace_back(tokens, scores);

      const bool unsure = u(rng) < 0.3;
      for (int m = 0; m < 4; ++m) {
        mc.row(i * 4 + m) = unsure ? peaked(c, (guess + m) % c, 0.9) : peaked(c, guess, conf);
      }
    }
    p.splits[name] = s;
    p.embeddings[name] = emb;
    p.syntax[name] = syntax;
    base.probs[name] = probs;
    base.saliency[name] = saliency;
    base.mc_samples[name] = {4, mc};
    alt.probs[name] = alt_probs;
  }

  if (opt.perturbed) {
    // Perturbed texts keep the original distribution unless they contain
    // "?", which flips to the next class.
    const auto& eval = p.splits.at("eval");
    const Eigen::MatrixXd& probs = base.probs.at("eval");
    std::vector<json> rows;
    for (std::size_t i = 0; i < eval.texts.size(); ++i) {
      const Utterance utt{static_cast<std::int64_t>(i), eval.texts[i], 0};
      for (const auto& v : generate_perturbations(utt, "eval", 42, 3)) {
        Eigen::RowVectorXd row = probs.row(static_cast<Eigen::Index>(i));
        if (v.perturbed_text.find('?') != std::string::npos) {
          Eigen::Index top = 0;
          row.maxCoeff(&top);
          row = peaked(c, (top + 1) % c, row(top));
        }
        rows.push_back({{"id", i}, {"test_name", v.test_name},
                        {"probs", std::vector<double>(row.data(), row.data() + row.size())}});
      }
    }
    base.perturbed["eval"] = rows;
  }
  p.pipelines = {base, alt};
  return p;
}

}  // namespace errscope::testing

#endif  // ERRSCOPE_TESTS_SUPPORT_DEMO_PROJECT_HPP_
