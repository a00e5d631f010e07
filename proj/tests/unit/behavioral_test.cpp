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

#include <fstream>
#include <sstream>
#include <thread>

#include "errscope/behavioral.hpp"
#include "errscope/prng.hpp"
#include "errscope/providers.hpp"
#include "httplib.h"
#include "support/closed_port.hpp"
#include "support/fixture.hpp"

namespace errscope {
namespace {

using nlohmann::json;
using testing::TempDir;
using testing::thrown_error;

std::map<std::string, std::string> by_name(const std::vector<PerturbedVariant>& vs) {
  std::map<std::string, std::string> out;
  for (const auto& v : vs) out[v.test_name] = v.perturbed_text;
  return out;
}

TEST(Perturbations, InnerCommaAfterFirstWord) {
  const auto vs = by_name(generate_perturbations({0, "where is my card", 0}, "eval", 42, 0));
  EXPECT_EQ(vs.at("inner_comma"), "where, is my card");
  EXPECT_EQ(vs.at("ending_period_add"), "where is my card.");
  EXPECT_EQ(vs.at("ending_question"), "where is my card?");
  EXPECT_FALSE(vs.count("ending_strip"));
}

TEST(Perturbations, EndingStripWhenPunctuated) {
  const auto vs = by_name(generate_perturbations({0, "where is my card?", 0}, "eval", 42, 0));
  EXPECT_EQ(vs.at("ending_strip"), "where is my card");
  EXPECT_FALSE(vs.count("ending_period_add"));
  // "?" already there, so the question variant equals the source and is skipped.
  EXPECT_FALSE(vs.count("ending_question"));
}

TEST(Perturbations, ShortTextSkipsInapplicableTests) {
  const auto vs = generate_perturbations({3, "hi", 0}, "eval", 42, 3);
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_EQ(vs[0].test_name, "ending_period_add");
  EXPECT_EQ(vs[1].test_name, "ending_question");
  EXPECT_TRUE(generate_perturbations({3, "", 0}, "eval", 42, 3).empty());
}

TEST(Perturbations, TypoKeepsOuterLettersAndIsDeterministic) {
  const Utterance u{7, "cancel reservation today", 0};
  const auto a = generate_perturbations(u, "eval", 9, 5);
  const auto b = generate_perturbations(u, "eval", 9, 5);
  EXPECT_EQ(a, b);
  int typos = 0;
  for (const auto& v : a) {
    if (v.family != PerturbationFamily::kFuzzyMatching) continue;
    ++typos;
    ASSERT_EQ(v.perturbed_text.size(), u.text.size());
    std::string x = v.perturbed_text, y = u.text;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    EXPECT_EQ(x, y);
    EXPECT_EQ(v.perturbed_text.front(), 'c');
  }
  EXPECT_EQ(typos, 5);
}

TEST(Perturbations, SeedChangesTypos) {
  const Utterance u{1, "international transfer pending approval", 0};
  EXPECT_NE(generate_perturbations(u, "eval", 1, 3), generate_perturbations(u, "eval", 2, 3));
}

json load_fixture() {
  std::ifstream in(ERRSCOPE_FIXTURE_DIR "/prng_conformance.json");
  EXPECT_TRUE(in.good());
  return json::parse(in);
}

TEST(PrngConformance, StreamsMatchIndependentImplementation) {
  const json fixture = load_fixture();
  ASSERT_FALSE(fixture["streams"].empty());
  for (const auto& s : fixture["streams"]) {
    const auto seed = s["seed"].get<std::uint64_t>();
    const auto id = s["id"].get<std::uint64_t>();
    const auto variant = s["variant"].get<std::uint64_t>();
    PerturbationStream rng(seed, id, variant);
    for (const auto& d : s["draws"]) EXPECT_EQ(rng.next(), d.get<std::uint64_t>());
    // below() values are consecutive calls on one fresh stream
    PerturbationStream fresh(seed, id, variant);
    for (const auto& pair : s["below"]) {
      EXPECT_EQ(fresh.below(pair[0].get<std::uint64_t>()), pair[1].get<std::uint64_t>())
          << "seed " << seed << " n " << pair[0];
    }
  }
}

TEST(PrngConformance, PerturbationsMatchIndependentImplementation) {
  const json fixture = load_fixture();
  ASSERT_FALSE(fixture["perturbations"].empty());
  for (const auto& c : fixture["perturbations"]) {
    const Utterance u{c["id"].get<std::int64_t>(), c["text"].get<std::string>(), 0};
    const auto got = generate_perturbations(u, "eval", c["seed"].get<std::uint64_t>(),
                                            c["typo_variants"].get<int>());
    ASSERT_EQ(got.size(), c["variants"].size()) << u.text;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const auto& want = c["variants"][i];
      EXPECT_EQ(got[i].test_name, want["test_name"].get<std::string>()) << u.text;
      EXPECT_EQ(family_name(got[i].family), want["family"].get<std::string>());
      EXPECT_EQ(got[i].perturbed_text, want["text"].get<std::string>()) << u.text;
    }
  }
}

// Returns the original probability row for every perturbed text.
class IdentityProvider : public PredictionProvider {
 public:
  explicit IdentityProvider(const Eigen::MatrixXd& probs) : probs_(probs) {}
  std::vector<Eigen::VectorXd> predict(std::span<const PredictionRequest> batch) override {
    std::vector<Eigen::VectorXd> out;
    for (const auto& r : batch) out.push_back(probs_.row(r.id).transpose());
    ++calls;
    return out;
  }
  int calls = 0;

 private:
  Eigen::MatrixXd probs_;
};

// Flips to class 1 whenever the text ends with '?'.
class QuestionSensitiveProvider : public PredictionProvider {
 public:
  std::vector<Eigen::VectorXd> predict(std::span<const PredictionRequest> batch) override {
    std::vector<Eigen::VectorXd> out;
    for (const auto& r : batch) {
      Eigen::VectorXd p(2);
      if (!r.text.empty() && r.text.back() == '?') p << 0.1, 0.9;
      else p << 0.9, 0.1;
      out.push_back(p);
    }
    return out;
  }
};

struct BehavioralFixture : ::testing::Test {
  void SetUp() override {
    split.name = "eval";
    const char* texts[] = {"book a flight", "cancel my reservation please", "hi",
                           "what is the weather"};
    for (int i = 0; i < 4; ++i) split.utterances.push_back({i, texts[i], 0});
    table.pipeline_id = "p";
    table.split = "eval";
    table.probs.resize(4, 2);
    table.probs << 0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.95, 0.05;
    preds = predict_split(split, table, 0.5, 2);
  }
  Split split;
  PredictionTable table;
  PredictionSet preds;
  Thresholds thresholds;
};

TEST_F(BehavioralFixture, IdentityProviderPassesEverything) {
  IdentityProvider provider(table.probs);
  const auto results = evaluate_invariance(split, preds, provider, 42, thresholds, 2);
  std::size_t expected = 0;
  for (const auto& u : split.utterances) {
    expected += generate_perturbations(u, "eval", 42, thresholds.typo_variants).size();
  }
  ASSERT_EQ(results.size(), expected);
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.confidence_delta, 0.0);
  }
  const auto summary = behavioral_tags_and_summary(results, split.size());
  for (const auto& t : summary.tags) EXPECT_EQ(t.size(), 0);
  for (const auto& f : summary.families) EXPECT_EQ(f.failed, 0);
}

TEST_F(BehavioralFixture, QuestionMarkFlipFailsOnlyPunctuation) {
  QuestionSensitiveProvider provider;
  const auto results = evaluate_invariance(split, preds, provider, 42, thresholds, 2);
  const auto summary = behavioral_tags_and_summary(results, split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    EXPECT_TRUE(summary.tags[i].contains(SmartTag::kFailedPunctuation)) << i;
    EXPECT_FALSE(summary.tags[i].contains(SmartTag::kFailedFuzzyMatching)) << i;
  }
  for (const auto& t : summary.tests) {
    if (t.name == "ending_question") EXPECT_EQ(t.failure_rate, 1.0);
    else EXPECT_EQ(t.failed, 0) << t.name;
  }
}

TEST_F(BehavioralFixture, ConfidenceDeltaLimit) {
  // Same class, but a confidence swing larger than the limit fails.
  class Shaky : public PredictionProvider {
    std::vector<Eigen::VectorXd> predict(std::span<const PredictionRequest> batch) override {
      return std::vector<Eigen::VectorXd>(batch.size(), Eigen::Vector2d(0.55, 0.45));
    }
  } provider;
  thresholds.max_confidence_delta = 0.3;
  const auto results = evaluate_invariance(split, preds, provider, 42, thresholds, 2);
  for (const auto& r : results) {
    const double before = table.probs(r.variant.id, 0);
    EXPECT_NEAR(r.confidence_delta, 0.55 - before, 1e-12);
    EXPECT_EQ(r.passed, std::abs(0.55 - before) <= 0.3) << r.variant.id;
  }
}

TEST(BehavioralSummary, FailureRateIsFailedOverTotal) {
  std::vector<InvarianceResult> results;
  for (int i = 0; i < 100; ++i) {
    InvarianceResult r;
    r.variant = {"eval", i % 10, PerturbationFamily::kFuzzyMatching, "typo_swap_0", "x"};
    r.passed = i >= 25;
    results.push_back(r);
  }
  const auto s = behavioral_tags_and_summary(results, 10);
  ASSERT_EQ(s.families.size(), 2u);
  for (const auto& f : s.families) {
    if (f.family == PerturbationFamily::kFuzzyMatching) {
      EXPECT_EQ(f.total, 100);
      EXPECT_EQ(f.failed, 25);
      EXPECT_EQ(f.failure_rate, 0.25);
    } else {
      EXPECT_EQ(f.total, 0);
      EXPECT_EQ(f.failure_rate, 0.0);
    }
  }
  for (int id = 0; id < 10; ++id) {
    EXPECT_TRUE(s.tags[id].contains(SmartTag::kFailedFuzzyMatching));
  }
}

TEST_F(BehavioralFixture, FileBackedProviderMissingRow) {
  TempDir dir;
  std::vector<json> rows;
  for (const auto& u : split.utterances) {
    for (const auto& v : generate_perturbations(u, "eval", 42, 3)) {
      if (u.id == 2 && v.test_name == "ending_question") continue;  // dropped on purpose
      rows.push_back({{"id", u.id}, {"test_name", v.test_name}, {"probs", {0.6, 0.4}}});
    }
  }
  testing::write_jsonl(dir.path() / "p.jsonl", rows);
  FileBackedProvider provider(dir.path() / "p.jsonl", 2);
  const auto err = thrown_error(
      [&] { evaluate_invariance(split, preds, provider, 42, thresholds, 2); });
  ASSERT_TRUE(err);
  EXPECT_EQ(err->code(), ErrorCode::kMissingPerturbedPrediction);
  EXPECT_NE(std::string(err->what()).find("ending_question"), std::string::npos);
}

TEST_F(BehavioralFixture, FileBackedProviderUserDefinedTests) {
  TempDir dir;
  std::vector<json> rows;
  for (const auto& u : split.utterances) {
    for (const auto& v : generate_perturbations(u, "eval", 42, 3)) {
      rows.push_back({{"id", u.id}, {"test_name", v.test_name}, {"probs", {0.6, 0.4}}});
    }
  }
  rows.push_back({{"id", 1},
                  {"test_name", "synonym_swap"},
                  {"family", "fuzzy_matching"},
                  {"perturbed_text", "drop my reservation please"},
                  {"probs", {0.2, 0.8}}});
  testing::write_jsonl(dir.path() / "p.jsonl", rows);
  FileBackedProvider provider(dir.path() / "p.jsonl", 2);
  const auto results = evaluate_invariance(split, preds, provider, 42, thresholds, 2);
  ASSERT_EQ(results.size(), rows.size());
  const auto& last = results.back();
  EXPECT_EQ(last.variant.test_name, "synonym_swap");
  EXPECT_EQ(last.variant.perturbed_text, "drop my reservation please");
  EXPECT_FALSE(last.passed);
  const auto summary = behavioral_tags_and_summary(results, split.size());
  EXPECT_TRUE(summary.tags[1].contains(SmartTag::kFailedFuzzyMatching));
  EXPECT_FALSE(summary.tags[0].contains(SmartTag::kFailedFuzzyMatching));
}

TEST(ProviderWire, RequestAndResponseFormat) {
  const std::vector<PredictionRequest> batch = {{0, "a", "hello \"x\""}, {1, "b", "caf\xc3\xa9"}};
  const std::string body = encode_provider_request(batch);
  std::istringstream lines(body);
  std::string line;
  std::vector<json> parsed;
  while (std::getline(lines, line)) parsed.push_back(json::parse(line));
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], json({{"text", "hello \"x\""}}));
  EXPECT_EQ(parsed[1]["text"], "caf\xc3\xa9");

  const auto probs = decode_provider_response("{\"probs\":[0.25,0.75]}\n\n{\"probs\":[1,0]}\n", 2);
  ASSERT_EQ(probs.size(), 2u);
  EXPECT_EQ(probs[0](1), 0.75);
  EXPECT_EQ(probs[1](0), 1.0);
  EXPECT_EQ(thrown_error([] { decode_provider_response("{\"probs\":[1]}\n", 2); })->code(),
            ErrorCode::kProviderUnavailable);
  EXPECT_EQ(thrown_error([] { decode_provider_response("not json\n", 2); })->code(),
            ErrorCode::kProviderUnavailable);
}

TEST(ProviderWire, SplitUrl) {
  EXPECT_EQ(split_url("http://localhost:9000/predict"),
            std::make_pair(std::string("http://localhost:9000"), std::string("/predict")));
  EXPECT_EQ(split_url("http://host"), std::make_pair(std::string("http://host"), std::string("/")));
}

// Small in-process model server: probability of class 1 is 0.9 when the
// text contains "?", otherwise 0.2.
class FakeModelServer {
 public:
  explicit FakeModelServer(int status = 200) {
    server_.Post("/predict", [status, this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      std::istringstream lines(req.body);
      std::string line, out;
      while (std::getline(lines, line)) {
        const auto text = json::parse(line).at("text").get<std::string>();
        const double p1 = text.find('?') != std::string::npos ? 0.9 : 0.2;
        out += json{{"probs", {1 - p1, p1}}}.dump() + "\n";
      }
      res.status = status;
      res.set_content(out, "application/x-ndjson");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeModelServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/predict"; }
  std::atomic<int> requests{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(BehavioralFixture, RemoteProviderRoundTrip) {
  FakeModelServer server;
  RemoteProvider provider(server.url(), 2);
  const auto results = evaluate_invariance(split, preds, provider, 42, thresholds, 2);
  ASSERT_FALSE(results.empty());
  for (const auto& r : results) {
    const bool question = r.variant.perturbed_text.find('?') != std::string::npos;
    EXPECT_EQ(r.perturbed_class, question ? 1 : 0) << r.variant.perturbed_text;
    EXPECT_EQ(r.passed, !question && std::abs(0.8 - table.probs(r.variant.id, 0)) <= 1.0);
  }
  EXPECT_EQ(server.requests.load(),
            static_cast<int>((results.size() + kProviderBatchSize - 1) / kProviderBatchSize));
}

TEST_F(BehavioralFixture, RemoteProviderFailures) {
  {
    FakeModelServer server(500);
    RemoteProvider provider(server.url(), 2);
    const auto err =
        thrown_error([&] { evaluate_invariance(split, preds, provider, 42, thresholds, 2); });
    ASSERT_TRUE(err);
    EXPECT_EQ(err->code(), ErrorCode::kProviderUnavailable);
    EXPECT_NE(std::string(err->what()).find("500"), std::string::npos);
  }
  const int port = testing::closed_port();
  RemoteProvider provider("http://127.0.0.1:" + std::to_string(port) + "/predict", 2);
  const auto err =
      thrown_error([&] { evaluate_invariance(split, preds, provider, 42, thresholds, 2); });
  ASSERT_TRUE(err);
  EXPECT_EQ(err->code(), ErrorCode::kProviderUnavailable);
}

}  // namespace
}  // namespace errscope
