// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <random>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "test_util.hpp"
#include "udeg/index.hpp"

using namespace udeg;
using index::InvertedIndex;

namespace {

const analysis::AnalyzerConfig kLowerOnly{true, false, false};

corpus::Collection random_collection(std::mt19937_64& rng, int n, int max_words) {
  corpus::Collection docs;
  for (int i = 0; i < n; ++i) {
    docs.push_back({"doc" + std::to_string(i), testing::random_text(rng, max_words)});
  }
  return docs;
}

std::string snapshot(const InvertedIndex& idx) {
  std::ostringstream out(std::ios::binary);
  idx.write(out);
  return out.str();
}

}  // namespace

TEST_CASE("build_index hand-counted statistics", "[index]") {
  const auto idx = InvertedIndex::build({{"d1", "a b"}, {"d2", "b c"}}, kLowerOnly);
  CHECK(idx.num_docs() == 2);
  CHECK(idx.avgdl() == 2.0);
  CHECK(idx.doc_frequency("b") == 2);
  CHECK(idx.doc_frequency("a") == 1);
  CHECK(idx.doc_frequency("zzz") == 0);
  CHECK(idx.term_frequency("a", "d2") == 0);
  CHECK(idx.term_frequency("a", "d1") == 1);
  CHECK(idx.collection_prob("b") == 0.5);
  CHECK(idx.collection_prob("zzz") == 0.0);
  CHECK_THROWS_AS(idx.term_frequency("a", "nope"), std::out_of_range);
}

TEST_CASE("build_index edge cases", "[index]") {
  CHECK_THROWS_AS(InvertedIndex::build({}, kLowerOnly), std::invalid_argument);

  const auto empty = InvertedIndex::build({{"d1", ""}}, kLowerOnly);
  CHECK(empty.num_docs() == 1);
  CHECK(empty.avgdl() == 0.0);
  CHECK(empty.num_terms() == 0);
  CHECK(empty.doc_length(0) == 0);

  CHECK_THROWS_AS(InvertedIndex::build({{"d1", "x"}, {"d1", "y"}}, kLowerOnly),
                  std::invalid_argument);
}

TEST_CASE("index statistics equal a brute-force recount", "[index][property]") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 5; ++round) {
    const auto docs = random_collection(rng, 200, 30);
    const auto idx = InvertedIndex::build(docs, kLowerOnly, 1 + round);

    // Independent recount straight from the text.
    std::map<std::string, std::map<std::string, std::uint32_t>> tf;  // term -> doc -> tf
    std::map<std::string, std::uint64_t> cf;
    std::uint64_t total = 0;
    for (const auto& d : docs) {
      std::istringstream words(d.text);
      std::string w;
      while (words >> w) {
        ++tf[w][d.id];
        ++cf[w];
        ++total;
      }
    }
    REQUIRE(idx.num_terms() == tf.size());
    CHECK(idx.total_tokens() == total);
    CHECK(idx.avgdl() == Catch::Approx(static_cast<double>(total) / 200.0).epsilon(1e-15));
    std::uint64_t cf_sum = 0;
    for (const auto& [term, docs_tf] : tf) {
      CHECK(idx.doc_frequency(term) == docs_tf.size());
      CHECK(idx.collection_prob(term) == static_cast<double>(cf[term]) / static_cast<double>(total));
      for (const auto& [doc, n] : docs_tf) CHECK(idx.term_frequency(term, doc) == n);
      cf_sum += idx.collection_count(*idx.term_id(term));
    }
    CHECK(cf_sum == idx.total_tokens());

    // Per-document invariants: Σ tf = doc length, postings sorted.
    for (index::DocOrdinal d = 0; d < idx.num_docs(); ++d) {
      std::uint64_t sum = 0;
      for (const auto& tc : idx.doc_terms(d)) sum += tc.tf;
      CHECK(sum == idx.doc_length(d));
      // Replay the document's tokens.
      std::map<std::string, std::uint32_t> replay;
      for (const auto& t : analysis::tokenize(docs[d].text, kLowerOnly)) ++replay[t];
      std::map<std::string, std::uint32_t> stored;
      for (const auto& tc : idx.doc_terms(d)) stored[idx.term(tc.term)] = tc.tf;
      CHECK(replay == stored);
    }
    for (index::TermId t = 0; t < idx.num_terms(); ++t) {
      const auto p = idx.postings(t);
      CHECK(std::is_sorted(p.begin(), p.end(),
                           [](const auto& a, const auto& b) { return a.doc < b.doc; }));
    }
  }
}

TEST_CASE("rebuilds are bit-identical for any parallelism", "[index][determinism]") {
  std::mt19937_64 rng(7);
  const auto docs = random_collection(rng, 300, 20);
  const auto reference = snapshot(InvertedIndex::build(docs, {}, 1));
  for (unsigned p : {1u, 2u, 3u, 8u}) {
    CHECK(snapshot(InvertedIndex::build(docs, {}, p)) == reference);
  }
}

TEST_CASE("snapshot round-trip", "[index][snapshot]") {
  std::mt19937_64 rng(8);
  const auto docs = random_collection(rng, 50, 10);
  const auto idx = InvertedIndex::build(docs, analysis::AnalyzerConfig{true, true, false});
  testing::TempDir dir;
  idx.save(dir / "i.idx");
  const auto loaded = InvertedIndex::load(dir / "i.idx");
  CHECK(snapshot(loaded) == snapshot(idx));
  CHECK(loaded.analyzer() == idx.analyzer());
  CHECK(loaded.num_docs() == idx.num_docs());
  CHECK(loaded.avgdl() == idx.avgdl());
  for (index::DocOrdinal d = 0; d < idx.num_docs(); ++d) {
    CHECK(loaded.doc_id(d) == idx.doc_id(d));
    CHECK(std::ranges::equal(loaded.doc_terms(d), idx.doc_terms(d)));
  }
}

TEST_CASE("snapshot rejects foreign or truncated files", "[index][snapshot]") {
  testing::TempDir dir;
  testing::write_file(dir / "junk", "definitely not an index");
  CHECK_THROWS_AS(InvertedIndex::load(dir / "junk"), std::runtime_error);

  const auto idx = InvertedIndex::build({{"d1", "a b c"}}, kLowerOnly);
  auto bytes = snapshot(idx);
  bytes.resize(bytes.size() - 3);
  testing::write_file(dir / "trunc", bytes);
  CHECK_THROWS_AS(InvertedIndex::load(dir / "trunc"), std::runtime_error);
}
