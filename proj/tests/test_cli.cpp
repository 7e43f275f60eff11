// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "catch_amalgamated.hpp"
#include "cli.hpp"
#include "test_util.hpp"
#include "udeg/corpus.hpp"
#include "udeg/index.hpp"

using namespace udeg;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome udeg_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path(const testing::TempDir& d, const char* name) { return (d / name).string(); }

}  // namespace

TEST_CASE("evaluate on a perfect run", "[cli]") {
  testing::TempDir dir;
  testing::write_file(dir / "run.txt", "q1 Q0 d1 1 2.0 t\nq2 Q0 d2 1 1.0 t\n");
  testing::write_file(dir / "qrels.txt", "q1 0 d1 1\nq2 0 d2 2\n");
  const auto r = udeg_cli({"evaluate", "--run", path(dir, "run.txt"), "--qrels",
                           path(dir, "qrels.txt"), "--cutoffs", "1"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "num_q\tall\t2\nmrr\tall\t1.0000\nmap\tall\t1.0000\nP@1\tall\t1.0000\n"
        "R@1\tall\t1.0000\nndcg@1\tall\t1.0000\n");

  const auto json = udeg_cli({"evaluate", "--run", path(dir, "run.txt"), "--qrels",
                              path(dir, "qrels.txt"), "--format", "json", "--antique"});
  CHECK(json.code == 0);
  CHECK(json.out.find("\"zero_relevant\": 2") != std::string::npos);
}

TEST_CASE("usage errors exit with 1", "[cli]") {
  CHECK(udeg_cli({"--bogus-flag"}).code == 1);
  CHECK(udeg_cli({}).code == 1);
  CHECK(udeg_cli({"search", "--index", "x"}).code == 1);
  CHECK(udeg_cli({"evaluate", "--run", "a", "--qrels", "b", "--cutoffs", "1,x"}).code == 1);
  CHECK(udeg_cli({"search", "--index", "x", "--queries", "y", "--output", "z", "--scorer", "tfidf"})
            .code == 1);
  const auto missing_syn = udeg_cli({"expand", "--input", "a", "--output", "b", "--generator", "mock"});
  CHECK(missing_syn.code == 1);
  CHECK(missing_syn.err.find("--synonyms") != std::string::npos);
  CHECK(udeg_cli({"--help"}).code == 0);
}

TEST_CASE("runtime errors exit with 2", "[cli]") {
  testing::TempDir dir;
  const auto r = udeg_cli({"evaluate", "--run", path(dir, "none.txt"), "--qrels",
                           path(dir, "none.txt")});
  CHECK(r.code == 2);
  CHECK(r.err.find("[error]") != std::string::npos);
  testing::write_file(dir / "bad.tsv", "no tab here\n");
  CHECK(udeg_cli({"index", "--input", path(dir, "bad.tsv"), "--output", path(dir, "i")}).code == 2);
}

TEST_CASE("end-to-end pipeline with the mock generator", "[cli][pipeline]") {
  testing::TempDir dir;
  testing::write_file(dir / "docs.tsv",
                      "d1\tThe automobile needs a new motor\n"
                      "d2\tBicycles are cheap to maintain\n"
                      "d3\tTrains run on time\n");
  testing::write_file(dir / "queries.tsv", "q1\tcar engine\nq2\tbicycles\n");
  testing::write_file(dir / "qrels.txt", "q1 0 d1 1\nq2 0 d2 1\n");
  testing::write_file(dir / "syn.tsv", "automobile\tcar\nmotor\tengine\n");

  // Without expansion the mismatch query finds nothing.
  REQUIRE(udeg_cli({"index", "--input", path(dir, "docs.tsv"), "--output", path(dir, "plain.idx")})
              .code == 0);
  REQUIRE(udeg_cli({"search", "--index", path(dir, "plain.idx"), "--queries",
                    path(dir, "queries.tsv"), "--output", path(dir, "plain.run")})
              .code == 0);
  const auto plain_run = corpus::read_run(path(dir, "plain.run"));
  for (const auto& e : plain_run) CHECK(e.query_id != "q1");

  const auto ex = udeg_cli({"--seed", "3", "expand", "--input", path(dir, "docs.tsv"), "--output",
                            path(dir, "exp.jsonl"), "--generator", "mock", "--synonyms",
                            path(dir, "syn.tsv"), "--num-sequences", "2"});
  REQUIRE(ex.code == 0);
  CHECK(ex.out.rfind("docs\t3\nfailures\t0\n", 0) == 0);

  REQUIRE(udeg_cli({"index", "--input", path(dir, "exp.jsonl"), "--output", path(dir, "exp.idx")})
              .code == 0);
  for (const char* scorer : {"bm25", "ql"}) {
    REQUIRE(udeg_cli({"search", "--index", path(dir, "exp.idx"), "--queries",
                      path(dir, "queries.tsv"), "--output", path(dir, "exp.run"), "--scorer",
                      scorer})
                .code == 0);
    const auto ev = udeg_cli({"evaluate", "--run", path(dir, "exp.run"), "--qrels",
                              path(dir, "qrels.txt"), "--cutoffs", "1"});
    CHECK(ev.code == 0);
    CHECK(ev.out.find("mrr\tall\t1.0000") != std::string::npos);
  }
  REQUIRE(udeg_cli({"search", "--index", path(dir, "exp.idx"), "--queries",
                    path(dir, "queries.tsv"), "--output", path(dir, "rm3.run"), "--rm3"})
              .code == 0);
  CHECK_FALSE(corpus::read_run(path(dir, "rm3.run")).empty());

  const auto div = udeg_cli({"diversity", "--expanded", path(dir, "exp.jsonl")});
  CHECK(div.code == 0);
  // d1's two sequences are both "car engine": 2 unique of 4.
  CHECK(div.out == "0.500000\n");
}

TEST_CASE("commands are reproducible byte for byte", "[cli][determinism]") {
  testing::TempDir dir;
  std::mt19937_64 rng(101);
  std::string docs;
  for (int i = 0; i < 60; ++i) {
    docs += "d" + std::to_string(i) + "\t" + testing::random_text(rng, 12) + ". " +
            testing::random_text(rng, 8) + ".\n";
  }
  testing::write_file(dir / "docs.tsv", docs);
  testing::write_file(dir / "syn.tsv", "a\tx,y,z\nb\tw\nabc\tq,r\n");
  testing::write_file(dir / "queries.tsv", "q1\ta b\nq2\tc d e\n");

  for (const char* gen : {"mock", "lexrank"}) {
    for (const char* par : {"1", "8"}) {
      const std::string out = path(dir, (std::string(gen) + par + ".jsonl").c_str());
      REQUIRE(udeg_cli({"--seed", "9", "--parallelism", par, "expand", "--input",
                        path(dir, "docs.tsv"), "--output", out, "--generator", gen,
                        "--synonyms", path(dir, "syn.tsv")})
                  .code == 0);
    }
    CHECK(testing::read_file(dir / (std::string(gen) + "1.jsonl")) ==
          testing::read_file(dir / (std::string(gen) + "8.jsonl")));
  }

  for (const char* par : {"1", "8"}) {
    REQUIRE(udeg_cli({"--parallelism", par, "index", "--input", path(dir, "mock1.jsonl"),
                      "--output", path(dir, (std::string("i") + par).c_str())})
                .code == 0);
    REQUIRE(udeg_cli({"--parallelism", par, "search", "--index",
                      path(dir, (std::string("i") + par).c_str()), "--queries",
                      path(dir, "queries.tsv"), "--output",
                      path(dir, (std::string("r") + par).c_str())})
                .code == 0);
  }
  CHECK(testing::read_file(dir / "i1") == testing::read_file(dir / "i8"));
  CHECK(testing::read_file(dir / "r1") == testing::read_file(dir / "r8"));
}

TEST_CASE("sample is seeded", "[cli]") {
  testing::TempDir dir;
  std::string docs;
  for (int i = 0; i < 50; ++i) docs += "d" + std::to_string(i) + "\ttext " + std::to_string(i) + "\n";
  testing::write_file(dir / "docs.tsv", docs);
  for (const char* name : {"s1.tsv", "s2.tsv"}) {
    REQUIRE(udeg_cli({"--seed", "5", "sample", "--input", path(dir, "docs.tsv"), "--output",
                      path(dir, name), "--count", "10"})
                .code == 0);
  }
  CHECK(testing::read_file(dir / "s1.tsv") == testing::read_file(dir / "s2.tsv"));
  CHECK(corpus::load_collection_tsv(dir / "s1.tsv").size() == 10);
}

TEST_CASE("unreachable generation service yields partial success", "[cli][remote]") {
  testing::TempDir dir;
  testing::write_file(dir / "docs.tsv", "d1\tsome text\nd2\tmore text\n");
  const int port = testing::unused_port();
  const auto r = udeg_cli({"expand", "--input", path(dir, "docs.tsv"), "--output",
                           path(dir, "out.jsonl"), "--generator", "remote", "--endpoint",
                           "http://127.0.0.1:" + std::to_string(port), "--max-retries", "0"});
  CHECK(r.code == 3);
  CHECK(r.out.find("failures\t2") != std::string::npos);
  CHECK(corpus::read_expanded_jsonl(dir / "out.jsonl").size() == 2);
}
