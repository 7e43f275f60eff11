// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <json.hpp>

#include "catch_amalgamated.hpp"
#include "oracles/eval_oracle.hpp"
#include "test_util.hpp"
#include "udeg/eval.hpp"

using namespace udeg;
using namespace udeg::eval;
using Catch::Matchers::WithinAbs;
using Strings = std::vector<std::string>;

TEST_CASE("reciprocal rank examples", "[eval]") {
  const EvalConfig c;
  const Judgments j = {{"r", 1}};
  CHECK(reciprocal_rank(Strings{"r", "x", "y"}, j, c) == 1.0);
  CHECK(reciprocal_rank(Strings{"x", "y", "r"}, j, c) == 1.0 / 3.0);
  CHECK(reciprocal_rank(Strings{"x", "y"}, j, c) == 0.0);
  EvalConfig cut;
  cut.mrr_cutoff = 2;
  CHECK(reciprocal_rank(Strings{"x", "y", "r"}, j, cut) == 0.0);
}

TEST_CASE("precision and recall examples", "[eval]") {
  const EvalConfig c;
  const Judgments j = {{"r1", 1}, {"r2", 2}, {"r3", 1}, {"r4", 1}, {"n", 0}};
  const Strings ranked = {"r1", "x", "r2", "n", "y", "r3"};
  CHECK(precision_at_k(ranked, j, 5, c) == 0.4);
  CHECK(recall_at_k(ranked, j, 5, c) == 0.5);
  CHECK(precision_at_k(Strings{"r1"}, j, 5, c) == 0.2);  // denominator stays K
  const Judgments two = {{"a", 1}, {"b", 1}};
  CHECK(recall_at_k(Strings{"b", "a"}, two, 10, c) == 1.0);
  CHECK(recall_at_k(Strings{"b"}, Judgments{{"b", 0}}, 10, c) == 0.0);
}

TEST_CASE("average precision examples", "[eval]") {
  const EvalConfig c;
  CHECK(average_precision(Strings{"a", "b", "x"}, Judgments{{"a", 1}, {"b", 1}}, c) == 1.0);
  CHECK(average_precision(Strings{"x", "a"}, Judgments{{"a", 1}}, c) == 0.5);
  CHECK(average_precision(Strings{"x"}, Judgments{{"a", 1}}, c) == 0.0);
}

TEST_CASE("ndcg examples", "[eval]") {
  const EvalConfig c;
  const Judgments j = {{"zero", 0}, {"three", 3}};
  CHECK_THAT(ndcg_at_k(Strings{"zero", "three"}, j, 2, c), WithinAbs(1.0 / std::log2(3.0), 1e-15));
  CHECK_THAT(ndcg_at_k(Strings{"zero", "three"}, j, 2, c), WithinAbs(0.6309, 1e-4));
  CHECK(ndcg_at_k(Strings{"three", "zero"}, j, 2, c) == 1.0);
  CHECK(ndcg_at_k(Strings{"a", "b"}, Judgments{{"a", 0}, {"b", 0}}, 2, c) == 0.0);

  EvalConfig linear;
  linear.gain = Gain::linear;
  const Judgments graded = {{"a", 1}, {"b", 2}};
  // DCG = 1 + 2/log2(3); IDCG = 2 + 1/log2(3).
  const double expected = (1.0 + 2.0 / std::log2(3.0)) / (2.0 + 1.0 / std::log2(3.0));
  CHECK_THAT(ndcg_at_k(Strings{"a", "b"}, graded, 2, linear), WithinAbs(expected, 1e-15));
}

TEST_CASE("relevance threshold", "[eval]") {
  EvalConfig c;
  c.relevance_threshold = kAntiqueRelevanceThreshold;
  const Judgments j = {{"a", 2}, {"b", 3}, {"c", 4}};
  CHECK(count_relevant(j, c) == 2);
  CHECK(reciprocal_rank(Strings{"a", "b"}, j, c) == 0.5);
  c.relevance_threshold = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.cutoffs = {5, 0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("evaluate_run single perfect query", "[eval]") {
  corpus::Qrels q;
  q.set("q1", "d1", 1);
  const std::vector<corpus::RunEntry> run = {{"q1", "d1", 1, 1.0, "t"}};
  const auto r = evaluate_run(run, q, EvalConfig{});
  CHECK(r.queries_evaluated == 1);
  for (const char* m : {"mrr", "map", "P@1", "R@1", "ndcg@1"}) CHECK(r.aggregate.at(m) == 1.0);
  CHECK(r.aggregate.at("P@5") == 0.2);
}

TEST_CASE("evaluate_run tallies unjudged and zero-relevant queries", "[eval]") {
  corpus::Qrels q;
  q.set("q1", "d1", 1);
  q.set("q2", "d9", 0);
  const std::vector<corpus::RunEntry> run = {
      {"q1", "d1", 1, 1.0, "t"}, {"q2", "d1", 1, 1.0, "t"}, {"q3", "d1", 1, 1.0, "t"}};
  const auto r = evaluate_run(run, q, EvalConfig{});
  CHECK(r.queries_evaluated == 2);
  CHECK(r.no_judgment == 1);
  CHECK(r.zero_relevant == 1);
  CHECK(r.aggregate.at("mrr") == 0.5);  // q2 contributes a zero
  CHECK(r.aggregate.at("map") == 1.0);  // q2 excluded
  CHECK(r.aggregate.at("R@1") == 1.0);
  REQUIRE(r.per_query.size() == 2);
  CHECK(r.per_query[1].values.count("map") == 0);
}

TEST_CASE("evaluate_run orders by rank and ignores repeated documents", "[eval]") {
  corpus::Qrels q;
  q.set("q", "rel", 1);
  const std::vector<corpus::RunEntry> run = {
      {"q", "rel", 3, 0.1, "t"}, {"q", "x", 1, 0.9, "t"}, {"q", "x", 2, 0.5, "t"}};
  const auto r = evaluate_run(run, q, EvalConfig{});
  CHECK(r.aggregate.at("mrr") == 0.5);
}

TEST_CASE("evaluate_run agrees with the brute-force oracle", "[eval][oracle][property]") {
  std::mt19937_64 rng(83);
  for (int round = 0; round < 200; ++round) {
    const auto inst = testing::random_eval_instance(rng);
    EvalConfig c;
    c.relevance_threshold = 1 + static_cast<int>(rng() % 2);
    c.cutoffs = {1, 3, 5, 10, 20};
    testing::OracleConfig oc{c.relevance_threshold, c.cutoffs};
    const auto report = evaluate_run(inst.run, inst.qrels, c);
    const auto expected = testing::oracle_aggregate(inst, oc);
    for (const auto& [name, v] : expected) {
      INFO(name);
      CHECK_THAT(report.aggregate.at(name), WithinAbs(v, 1e-9));
    }
  }
}

TEST_CASE("metrics stay in range and respond to moving a relevant document up",
          "[eval][property]") {
  std::mt19937_64 rng(89);
  const EvalConfig c;
  for (int round = 0; round < 300; ++round) {
    Strings ranked;
    Judgments j;
    const int n = 2 + static_cast<int>(rng() % 15);
    for (int i = 0; i < n; ++i) {
      ranked.push_back("d" + std::to_string(i));
      if (rng() % 3 == 0) j[ranked.back()] = static_cast<int>(rng() % 4);
    }
    auto all = [&](const Strings& r) {
      return std::vector<double>{reciprocal_rank(r, j, c), average_precision(r, j, c),
                                 precision_at_k(r, j, 5, c), recall_at_k(r, j, 5, c),
                                 ndcg_at_k(r, j, 5, c)};
    };
    const auto before = all(ranked);
    for (double v : before) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
    // Swap a relevant document with the one directly above it.
    for (int i = 1; i < n; ++i) {
      const int gi = j.count(ranked[i]) ? j[ranked[i]] : 0;
      const int gp = j.count(ranked[i - 1]) ? j[ranked[i - 1]] : 0;
      if (gi >= 1 && gp == 0) {
        auto swapped = ranked;
        std::swap(swapped[i], swapped[i - 1]);
        const auto after = all(swapped);
        for (std::size_t m = 0; m < after.size(); ++m) CHECK(after[m] >= before[m] - 1e-12);
        break;
      }
    }
  }
}

TEST_CASE("report serialization", "[eval]") {
  corpus::Qrels q;
  q.set("q1", "d1", 1);
  const std::vector<corpus::RunEntry> run = {{"q1", "d1", 1, 1.0, "t"}};
  EvalConfig c;
  c.cutoffs = {1};
  const auto r = evaluate_run(run, q, c);
  CHECK(r.to_tsv() ==
        "num_q\tall\t1\nmrr\tall\t1.0000\nmap\tall\t1.0000\nP@1\tall\t1.0000\n"
        "R@1\tall\t1.0000\nndcg@1\tall\t1.0000\n");
  CHECK(r.to_tsv(true).rfind("mrr\tq1\t1.0000\n", 0) == 0);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.at("aggregate").at("ndcg@1") == 1.0);
  CHECK(j.at("per_query").at("q1").at("mrr") == 1.0);
  CHECK(j.at("no_judgment") == 0);
  EvalConfig named;
  named.mrr_cutoff = 10;
  CHECK(metric_names(named).front() == "mrr@10");
}

TEST_CASE("lexical diversity examples", "[eval][diversity]") {
  CHECK(document_diversity({"a b a"}) == 2.0 / 3.0);
  CHECK(document_diversity({"a b", "c"}) == 1.0);
  CHECK(document_diversity({"A a"}) == 0.5);
  CHECK_FALSE(document_diversity({}).has_value());
  CHECK_FALSE(document_diversity({"", "..."}).has_value());

  const std::vector<corpus::ExpandedDocument> docs = {
      {"d1", "x", {"a b a"}}, {"d2", "y", {"c d"}}, {"d3", "z", {}}};
  CHECK(lexical_diversity(docs) == (2.0 / 3.0 + 1.0) / 2.0);
  CHECK(lexical_diversity({}) == 0.0);
}

TEST_CASE("appending a duplicate sentence never raises diversity", "[eval][diversity][property]") {
  std::mt19937_64 rng(97);
  for (int round = 0; round < 500; ++round) {
    Strings gen;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 4); i < n; ++i) {
      gen.push_back(testing::random_text(rng, 6) + " w");
    }
    const auto before = document_diversity(gen);
    REQUIRE(before.has_value());
    gen.push_back(gen[rng() % gen.size()]);
    const auto after = document_diversity(gen);
    REQUIRE(after.has_value());
    CHECK(*after <= *before);
  }
}
