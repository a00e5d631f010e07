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
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "errscope/action_store.hpp"
#include "errscope/query.hpp"
#include "errscope/query_string.hpp"
#include "support/filter_oracle.hpp"
#include "support/fixture.hpp"

namespace errscope {
namespace {

using testing::TempDir;
using testing::thrown_error;

using testing::naive;
using testing::RandomTable;

TEST(Filter, MatchesNaiveScan) {
  RandomTable t(1);
  for (int trial = 0; trial < 300; ++trial) {
    const FilterSpec spec = t.random_spec();
    const auto expected = naive(t, spec);
    const auto got = filter_utterances(t.table, t.actions, spec);
    EXPECT_EQ(got.ids, expected) << trial;
    EXPECT_EQ(got.total_count, static_cast<std::int64_t>(expected.size()));
    EXPECT_EQ(matching_ids(t.table, t.actions, spec), expected);
  }
}

TEST(Filter, EmptySpecMatchesAll) {
  RandomTable t(2, 50);
  EXPECT_EQ(filter_utterances(t.table, t.actions, {}).ids, all_ids(t.split));
}

TEST(Filter, ImpossibleCombinationIsEmptyNotError) {
  RandomTable t(3, 50);
  FilterSpec s;
  s.confidence_min = s.confidence_max = 0.0;  // Dirichlet rows never have top 0
  const auto r = filter_utterances(t.table, t.actions, s);
  EXPECT_EQ(r.total_count, 0);
  EXPECT_TRUE(r.ids.empty());
}

TEST(Filter, TagFamilySemantics) {
  Split split;
  split.name = "eval";
  for (int i = 0; i < 4; ++i) split.utterances.push_back({i, "t", 0});
  PredictionTable p;
  p.probs = Eigen::MatrixXd::Constant(4, 2, 0.5);
  const auto preds = predict_split(split, p, 0.0, 2);
  std::vector<TagSet> tags(4);
  tags[0].insert(SmartTag::kLongSentence);
  tags[1].insert(SmartTag::kShortSentence);
  tags[2].insert(SmartTag::kShortSentence);
  tags[2].insert(SmartTag::kMissingVerb);
  tags[3].insert(SmartTag::kMissingVerb);
  const auto table = build_query_table(split, preds, tags, {"a", "b", "oos"});
  const std::vector<ActionValue> actions(4, ActionValue::kNoAction);
  FilterSpec s;
  s.smart_tags.insert(SmartTag::kLongSentence);
  s.smart_tags.insert(SmartTag::kShortSentence);
  EXPECT_EQ(filter_utterances(table, actions, s).ids, (std::vector<std::int64_t>{0, 1, 2}));
  s.smart_tags.insert(SmartTag::kMissingVerb);
  EXPECT_EQ(filter_utterances(table, actions, s).ids, (std::vector<std::int64_t>{2}));
}

TEST(Filter, InvalidRange) {
  RandomTable t(4, 10);
  FilterSpec s;
  s.confidence_min = 0.8;
  s.confidence_max = 0.2;
  EXPECT_EQ(thrown_error([&] { filter_utterances(t.table, t.actions, s); })->code(),
            ErrorCode::kInvalidRange);
  s.confidence_min = -0.1;
  s.confidence_max = 0.5;
  EXPECT_EQ(thrown_error([&] { filter_utterances(t.table, t.actions, s); })->code(),
            ErrorCode::kInvalidRange);
}

TEST(Sort, OrdersAndBreaksTiesById) {
  RandomTable t(5, 200);
  const std::vector<std::string> names = {"b", "a", "d", "c", "oos"};
  for (auto field : {SortField::kId, SortField::kTopConfidence, SortField::kLabel,
                     SortField::kPrediction}) {
    for (auto dir : {SortDirection::kAscending, SortDirection::kDescending}) {
      const auto ids = filter_utterances(t.table, t.actions, {}, {field, dir}).ids;
      ASSERT_EQ(ids.size(), 200u);
      for (std::size_t k = 1; k < ids.size(); ++k) {
        const auto& a = t.table.rows[ids[k - 1]];
        const auto& b = t.table.rows[ids[k]];
        int c = 0;
        switch (field) {
          case SortField::kId: c = a.id < b.id ? -1 : 1; break;
          case SortField::kTopConfidence:
            c = a.top_confidence < b.top_confidence ? -1 : a.top_confidence > b.top_confidence;
            break;
          case SortField::kLabel: c = names[a.label].compare(names[b.label]); break;
          case SortField::kPrediction:
            c = names[a.post_prediction].compare(names[b.post_prediction]);
            break;
        }
        if (dir == SortDirection::kDescending) c = -c;
        EXPECT_LE(c, 0);
        if (c == 0) EXPECT_LT(a.id, b.id);
      }
    }
  }
}

TEST(Page, PagesPartitionTheResult) {
  RandomTable t(6, 237);
  const SortSpec sort{SortField::kTopConfidence, SortDirection::kDescending};
  const auto whole = filter_utterances(t.table, t.actions, {}, sort).ids;
  for (std::int64_t limit : {1, 7, 50, 237, 500}) {
    std::vector<std::int64_t> joined;
    for (std::int64_t off = 0; off < 237; off += limit) {
      const auto page = filter_utterances(t.table, t.actions, {}, sort, {off, limit});
      EXPECT_EQ(page.total_count, 237);
      joined.insert(joined.end(), page.ids.begin(), page.ids.end());
    }
    EXPECT_EQ(joined, whole) << limit;
  }
  EXPECT_TRUE(filter_utterances(t.table, t.actions, {}, sort, {1000, 10}).ids.empty());
}

ProjectConfig query_config() {
  return parse_config(nlohmann::json::parse(R"({
    "project_name": "q",
    "classes": ["b", "a", "d", "c"],
    "rejection_class": "oos",
    "splits": {"train": "train.jsonl", "eval": "eval.jsonl"},
    "pipelines": [{"id": "base", "predictions": {"eval": "p.jsonl"}},
                  {"id": "other", "predictions": {"eval": "o.jsonl"}}]
  })"),
                      "/q");
}

TEST(QueryString, RoundTripRandomSpecs) {
  const ProjectConfig cfg = query_config();
  RandomTable t(7, 5);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    FilterSpec spec = t.random_spec();
    if (coin(t.rng)) spec.text_contains = "a&b=c %+ é?";
    if (coin(t.rng)) spec.pipeline_id = "other";
    const std::string qs = encode_filter(spec, cfg);
    EXPECT_EQ(parse_filter(parse_query_string(qs), cfg), spec) << qs;
  }
  EXPECT_EQ(encode_filter({}, cfg), "");
}

TEST(QueryString, SortAndPageRoundTrip) {
  for (auto field : {SortField::kId, SortField::kTopConfidence, SortField::kLabel,
                     SortField::kPrediction}) {
    const SortSpec sort{field, SortDirection::kDescending};
    const PageSpec page{40, 20};
    const auto params = parse_query_string(encode_sort_page(sort, page));
    EXPECT_EQ(parse_sort(params), sort);
    EXPECT_EQ(parse_page(params), page);
  }
}

TEST(QueryString, Errors) {
  const ProjectConfig cfg = query_config();
  auto code = [&](std::string_view qs) {
    return thrown_error([&] { parse_filter(parse_query_string(qs), cfg); })->code();
  };
  EXPECT_EQ(code("label=zebra"), ErrorCode::kUnknownClass);
  EXPECT_EQ(code("outcome=maybe"), ErrorCode::kBadRequest);
  EXPECT_EQ(code("smart_tag=very_long"), ErrorCode::kUnknownTagName);
  EXPECT_EQ(code("data_action=burn"), ErrorCode::kUnknownAction);
  EXPECT_EQ(code("pipeline=nope"), ErrorCode::kUnknownPipeline);
  EXPECT_EQ(code("confidence_min=0.9&confidence_max=0.1"), ErrorCode::kInvalidRange);
  EXPECT_EQ(code("confidence_min=abc"), ErrorCode::kBadRequest);
  EXPECT_EQ(thrown_error([] { parse_page(parse_query_string("offset=-1")); })->code(),
            ErrorCode::kInvalidRange);
  // rejection class is a valid label
  EXPECT_EQ(parse_filter(parse_query_string("label=oos&unknown=1"), cfg).labels,
            (std::set<ClassIndex>{4}));
}

TEST(QueryString, PercentCoding) {
  EXPECT_EQ(percent_encode("a b/é"), "a%20b%2F%C3%A9");
  EXPECT_EQ(percent_decode("a+b%2fc%zz%4"), "a b/c%zz%4");
  EXPECT_EQ(percent_decode("%41"), "A");
  const auto p = parse_query_string("?x=1&&y&x=2");
  EXPECT_EQ(p.count("x"), 2u);
  EXPECT_EQ(p.find("y")->second, "");
}

// Small on-disk project for store and CSV tests.
struct StoreFixture : ::testing::Test {
  void SetUp() override {
    testing::ProjectData p;
    p.classes = {"card", "fee"};
    p.splits["train"] = {{"block my card", "what fee"}, {"card", "fee"}};
    p.splits["eval"] = {{"lost \"my\" card", "fee, again", "hello\nthere", "ok"},
                        {"card", "fee", "oos", "card"}};
    testing::PipelineData pl;
    pl.id = "base";
    pl.probs["eval"] = Eigen::MatrixXd::Constant(4, 2, 0.5);
    p.pipelines.push_back(pl);
    state = load_artifacts(load_config(testing::write_project(dir.path(), p)));
  }
  const Split& eval() const { return state.split("eval"); }

  TempDir dir;
  ProjectState state;
};

TEST_F(StoreFixture, SetGetAndPersist) {
  const auto log = dir.path() / "actions.jsonl";
  {
    ActionStore store(log);
    EXPECT_EQ(store.get("eval", 1), ActionValue::kNoAction);
    const auto a = store.set(eval(), 1, "relabel");
    EXPECT_EQ(a.value, ActionValue::kRelabel);
    EXPECT_EQ(a.updated_at.size(), 24u);
    EXPECT_EQ(a.updated_at.back(), 'Z');
    store.set(eval(), 2, ActionValue::kRemove);
    store.set(eval(), 2, ActionValue::kInvestigate);
    store.set(eval(), 3, ActionValue::kRemove);
    store.set(eval(), 3, ActionValue::kNoAction);
  }
  ActionStore reopened(log);
  EXPECT_EQ(reopened.get("eval", 1), ActionValue::kRelabel);
  EXPECT_EQ(reopened.get("eval", 2), ActionValue::kInvestigate);
  EXPECT_EQ(reopened.get("eval", 3), ActionValue::kNoAction);
  EXPECT_EQ(reopened.entries().size(), 2u);
  EXPECT_EQ(reopened.values_for(eval()),
            (std::vector<ActionValue>{ActionValue::kNoAction, ActionValue::kRelabel,
                                      ActionValue::kInvestigate, ActionValue::kNoAction}));
}

TEST_F(StoreFixture, Errors) {
  ActionStore store(dir.path() / "a.jsonl");
  EXPECT_EQ(thrown_error([&] { store.set(eval(), 99, ActionValue::kRemove); })->code(),
            ErrorCode::kUnknownUtterance);
  EXPECT_EQ(thrown_error([&] { store.set(eval(), 0, "delete_everything"); })->code(),
            ErrorCode::kUnknownAction);
  EXPECT_TRUE(store.entries().empty());
}

TEST_F(StoreFixture, CompactionKeepsLastValues) {
  const auto log = dir.path() / "actions.jsonl";
  {
    ActionStore store(log);
    for (int round = 0; round < 100; ++round) {
      store.set(eval(), round % 4, static_cast<ActionValue>(1 + round % 6));
    }
  }
  std::ifstream in(log);
  const auto lines = std::count(std::istreambuf_iterator<char>(in), {}, '\n');
  EXPECT_LT(lines, 100);
  ActionStore reopened(log);
  for (int id = 0; id < 4; ++id) {
    EXPECT_EQ(reopened.get("eval", id), static_cast<ActionValue>(1 + (96 + id) % 6));
  }
}

TEST_F(StoreFixture, ConcurrentWritersDoNotLoseUpdates) {
  const auto log = dir.path() / "actions.jsonl";
  ActionStore store(log);
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      for (int k = 0; k < 50; ++k) store.set(eval(), w, ActionValue::kAugmentWithSimilar);
    });
  }
  for (auto& t : threads) t.join();
  ActionStore reopened(log);
  for (int id = 0; id < 4; ++id) {
    EXPECT_EQ(reopened.get("eval", id), ActionValue::kAugmentWithSimilar);
  }
}

TEST_F(StoreFixture, CsvHeaderOnlyWhenEmpty) {
  ActionStore store(dir.path() / "a.jsonl");
  std::size_t rows = 7;
  EXPECT_EQ(proposed_actions_csv(store, state, &rows), "split,id,text,label,proposed_action\n");
  EXPECT_EQ(rows, 0u);
}

TEST_F(StoreFixture, CsvRowsQuoteEveryField) {
  ActionStore store(dir.path() / "a.jsonl");
  store.set(eval(), 0, ActionValue::kRelabel);
  store.set(eval(), 1, ActionValue::kMergeClasses);
  store.set(eval(), 2, ActionValue::kDefineNewClass);
  std::size_t rows = 0;
  const std::string csv = proposed_actions_csv(store, state, &rows);
  EXPECT_EQ(rows, 3u);
  EXPECT_EQ(csv,
            "split,id,text,label,proposed_action\n"
            "\"eval\",\"0\",\"lost \"\"my\"\" card\",\"card\",\"relabel\"\n"
            "\"eval\",\"1\",\"fee, again\",\"fee\",\"merge_classes\"\n"
            "\"eval\",\"2\",\"hello\nthere\",\"oos\",\"define_new_class\"\n");
  const auto records = parse_csv(csv);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[1][2], "lost \"my\" card");
  EXPECT_EQ(records[3][2], "hello\nthere");
}

TEST_F(StoreFixture, ExportClearImportRoundTrip) {
  ActionStore store(dir.path() / "a.jsonl");
  store.set(eval(), 0, ActionValue::kRelabel);
  store.set(eval(), 2, ActionValue::kRemove);
  store.set(eval(), 3, ActionValue::kAugmentWithSimilar);
  const auto before = store.values_for(eval());
  const auto csv = dir.path() / "out.csv";
  EXPECT_EQ(export_proposed_actions(store, state, csv), 3u);
  store.clear();
  EXPECT_TRUE(store.entries().empty());
  EXPECT_EQ(import_proposed_actions(store, state, csv), 3u);
  EXPECT_EQ(store.values_for(eval()), before);
}

TEST(Csv, Malformed) {
  EXPECT_EQ(thrown_error([] { parse_csv("\"open"); })->code(), ErrorCode::kMalformedRow);
  EXPECT_EQ(parse_csv("a,b\r\n\"c\",\"\"\n"),
            (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", ""}}));
}

}  // namespace
}  // namespace errscope
