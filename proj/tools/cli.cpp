// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "udeg/analysis.hpp"
#include "udeg/corpus.hpp"
#include "udeg/eval.hpp"
#include "udeg/expansion.hpp"
#include "udeg/index.hpp"
#include "udeg/retrieval.hpp"

namespace udeg::cli {
namespace {

/// Invalid flag values or combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalyzerFlags {
  bool no_lowercase = false;
  bool no_stem = false;
  bool no_stopwords = false;

  void add_to(CLI::App& cmd) {
    cmd.add_flag("--no-lowercase", no_lowercase, "Keep original case");
    cmd.add_flag("--no-stem", no_stem, "Disable Porter stemming");
    cmd.add_flag("--no-stopwords", no_stopwords, "Keep stopwords");
  }

  analysis::AnalyzerConfig config() const {
    return {!no_lowercase, !no_stem, !no_stopwords};
  }
};

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned parallelism = std::max(1u, std::thread::hardware_concurrency());
  std::string log_level = "info";
};

struct IndexArgs {
  std::string input;
  std::string output;
  std::string format = "auto";
  AnalyzerFlags analyzer;
};

struct ExpandArgs {
  std::string input;
  std::string output;
  std::string generator;
  std::string endpoint;
  std::string strategy = "beam";
  std::string synonyms;
  int num_sequences = 4;
  int beam_size = 8;
  int top_k = 50;
  int max_length = 64;
  int sentences_per_sequence = 1;
  int max_retries = 3;
  int max_in_flight = 4;
  AnalyzerFlags analyzer;
};

struct SearchArgs {
  std::string index;
  std::string queries;
  std::string scorer = "bm25";
  std::string output;
  std::string tag = "udeg";
  bool rm3 = false;
  int k = 1000;
  retrieval::ScorerParams params;
};

struct EvaluateArgs {
  std::string run;
  std::string qrels;
  std::string cutoffs = "1,5,10";
  std::optional<int> mrr_cutoff;
  int threshold = 1;
  bool antique = false;
  bool linear_gain = false;
  bool per_query = false;
  std::string format = "tsv";
};

struct SampleArgs {
  std::string input;
  std::string output;
  std::size_t count = 0;
};

std::vector<int> parse_cutoffs(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(piece, &used);
      if (used != piece.size() || k < 1) throw std::invalid_argument(piece);
      out.push_back(k);
    } catch (const std::exception&) {
      throw UsageError("invalid cutoff '" + piece + "'");
    }
  }
  if (out.empty()) throw UsageError("--cutoffs must list at least one value");
  return out;
}

int cmd_index(const IndexArgs& a, const Globals& g, spdlog::logger& log) {
  std::string format = a.format;
  if (format == "auto") {
    format = std::filesystem::path(a.input).extension() == ".jsonl" ? "jsonl" : "tsv";
  }
  corpus::Collection docs;
  if (format == "jsonl") {
    docs = corpus::to_collection(corpus::read_expanded_jsonl(a.input));
  } else {
    docs = corpus::load_collection_tsv(a.input);
  }
  log.info("indexing {} documents from {} ({})", docs.size(), a.input, format);
  const auto idx = index::InvertedIndex::build(docs, a.analyzer.config(), g.parallelism);
  idx.save(a.output);
  log.info("wrote {}: {} terms, {} tokens, avgdl {:.3f}", a.output, idx.num_terms(),
           idx.total_tokens(), idx.avgdl());
  return kSuccess;
}

int cmd_expand(const ExpandArgs& a, const Globals& g, std::ostream& out,
               spdlog::logger& log) {
  expansion::GeneratorSpec spec;
  spec.kind = expansion::parse_generator_kind(a.generator);
  spec.strategy = expansion::parse_strategy(a.strategy);
  spec.num_sequences = a.num_sequences;
  spec.beam_size = a.beam_size;
  spec.top_k = a.top_k;
  spec.max_length = a.max_length;
  spec.seed = g.seed;
  spec.sentences_per_sequence = a.sentences_per_sequence;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::optional<expansion::SynonymTable> table;
  std::optional<expansion::RemoteConfig> remote;
  if (spec.kind == expansion::GeneratorKind::mock_synonym) {
    if (a.synonyms.empty()) throw UsageError("--generator mock requires --synonyms");
    table = expansion::load_synonym_table(a.synonyms);
  }
  if (spec.kind == expansion::GeneratorKind::remote_abstractive) {
    remote.emplace();
    remote->endpoint = a.endpoint;
    if (remote->endpoint.empty()) {
      if (const char* env = std::getenv(expansion::kEndpointEnv)) remote->endpoint = env;
    }
    if (remote->endpoint.empty()) {
      throw UsageError(std::string("--generator remote requires --endpoint or ") +
                       expansion::kEndpointEnv);
    }
    remote->max_retries = a.max_retries;
    remote->max_in_flight = a.max_in_flight;
  }

  const auto analyzer = a.analyzer.config();
  auto generator = expansion::make_generator(spec, analyzer, table ? &*table : nullptr,
                                             remote ? &*remote : nullptr);
  const auto docs = corpus::load_collection_tsv(a.input);
  log.info("expanding {} documents with {} (S={}, parallelism {})", docs.size(),
           generator->name(), spec.num_sequences, g.parallelism);
  const auto summary =
      expansion::expand_collection(docs, *generator, analyzer, a.output, g.parallelism);
  for (const auto& [doc, error] : summary.failed) log.error("expansion failed: {}", error);

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "docs\t%zu\nfailures\t%zu\nmean_K\t%.6f\nmean_N\t%.6f\nmean_novelty\t%.6f\n",
                summary.docs_processed, summary.failures, summary.mean_generated,
                summary.mean_novel, summary.mean_novelty_ratio);
  out << buf;
  if (summary.failures > 0) {
    log.warn("{} of {} documents expanded without generated text", summary.failures,
             summary.docs_processed);
    return kPartialSuccess;
  }
  return kSuccess;
}

int cmd_search(const SearchArgs& a, const Globals& g, spdlog::logger& log) {
  const auto scorer = retrieval::parse_scorer(a.scorer);
  try {
    a.params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const auto idx = index::InvertedIndex::load(a.index);
  const auto queries = corpus::load_queries_tsv(a.queries);
  log.info("searching {} queries with {}{} (k={})", queries.size(), a.scorer,
           a.rm3 ? "+rm3" : "", a.k);

  std::vector<retrieval::RankedList> results(queries.size());
  const std::size_t workers =
      std::clamp<std::size_t>(g.parallelism, 1, std::max<std::size_t>(1, queries.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      const auto& q = queries[i];
      results[i] = a.rm3 ? retrieval::search_rm3(idx, q.id, q.text, scorer, a.params,
                                                 static_cast<std::size_t>(a.k))
                         : retrieval::search(idx, q.id, q.text, scorer, a.params,
                                             static_cast<std::size_t>(a.k));
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  std::vector<corpus::RunEntry> run;
  for (const auto& r : results) {
    auto entries = retrieval::to_run_entries(r, a.tag);
    run.insert(run.end(), std::make_move_iterator(entries.begin()),
               std::make_move_iterator(entries.end()));
  }
  corpus::write_run(run, a.output);
  log.info("wrote {} run lines to {}", run.size(), a.output);
  return kSuccess;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, spdlog::logger& log) {
  eval::EvalConfig config;
  config.cutoffs = parse_cutoffs(a.cutoffs);
  config.mrr_cutoff = a.mrr_cutoff;
  config.relevance_threshold = a.antique ? eval::kAntiqueRelevanceThreshold : a.threshold;
  config.gain = a.linear_gain ? eval::Gain::linear : eval::Gain::exponential;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto run = corpus::read_run(a.run);
  const auto qrels = corpus::load_qrels(a.qrels);
  if (qrels.duplicate_count() > 0) {
    log.warn("{} duplicate qrels pairs; last grade kept", qrels.duplicate_count());
  }
  const auto report = eval::evaluate_run(run, qrels, config);
  if (report.no_judgment > 0) {
    log.warn("{} run queries have no judgments and were skipped", report.no_judgment);
  }
  if (report.zero_relevant > 0) {
    log.info("{} queries without relevant documents excluded from recall/MAP",
             report.zero_relevant);
  }
  out << (a.format == "json" ? report.to_json(a.per_query) + "\n" : report.to_tsv(a.per_query));
  return kSuccess;
}

int cmd_diversity(const std::string& expanded, std::ostream& out) {
  const auto docs = corpus::read_expanded_jsonl(expanded);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f\n", eval::lexical_diversity(docs));
  out << buf;
  return kSuccess;
}

int cmd_sample(const SampleArgs& a, const Globals& g, spdlog::logger& log) {
  const auto docs = corpus::load_collection_tsv(a.input);
  const auto sample = corpus::sample_collection(docs, a.count, g.seed.value_or(0));
  corpus::write_collection_tsv(sample, a.output);
  log.info("sampled {} of {} documents", sample.size(), docs.size());
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"udeg: document expansion, indexing, retrieval and evaluation", "udeg"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step");
  app.add_option("--parallelism", g.parallelism, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  IndexArgs ia;
  auto* index_cmd = app.add_subcommand("index", "Build an index snapshot from TSV or JSONL");
  index_cmd->add_option("--input", ia.input, "Collection (.tsv or expanded .jsonl)")->required();
  index_cmd->add_option("--output", ia.output, "Index snapshot path")->required();
  index_cmd->add_option("--format", ia.format)->check(CLI::IsMember({"auto", "tsv", "jsonl"}));
  ia.analyzer.add_to(*index_cmd);

  ExpandArgs ea;
  auto* expand_cmd = app.add_subcommand("expand", "Expand documents with generated text");
  expand_cmd->add_option("--input", ea.input, "Collection TSV")->required();
  expand_cmd->add_option("--output", ea.output, "Expanded JSONL")->required();
  expand_cmd->add_option("--generator", ea.generator)
      ->required()
      ->check(CLI::IsMember({"lexrank", "mock", "mock-synonym", "remote", "remote-abstractive"}));
  expand_cmd->add_option("--endpoint", ea.endpoint, "Generation service URL");
  expand_cmd->add_option("--strategy", ea.strategy)
      ->check(CLI::IsMember({"beam", "mc-dropout", "top-k"}));
  expand_cmd->add_option("--num-sequences", ea.num_sequences, "S");
  expand_cmd->add_option("--beam-size", ea.beam_size);
  expand_cmd->add_option("--top-k", ea.top_k);
  expand_cmd->add_option("--max-length", ea.max_length);
  expand_cmd->add_option("--sentences-per-sequence", ea.sentences_per_sequence);
  expand_cmd->add_option("--synonyms", ea.synonyms, "token<TAB>syn1,syn2 table (mock)");
  expand_cmd->add_option("--max-retries", ea.max_retries);
  expand_cmd->add_option("--max-in-flight", ea.max_in_flight);
  ea.analyzer.add_to(*expand_cmd);

  SearchArgs sa;
  auto* search_cmd = app.add_subcommand("search", "Retrieve top-k documents per query");
  search_cmd->add_option("--index", sa.index)->required();
  search_cmd->add_option("--queries", sa.queries, "Queries TSV")->required();
  search_cmd->add_option("--scorer", sa.scorer)->check(CLI::IsMember({"bm25", "ql"}));
  search_cmd->add_flag("--rm3", sa.rm3, "RM3 pseudo-relevance feedback");
  search_cmd->add_option("--k", sa.k);
  search_cmd->add_option("--output", sa.output, "Run file")->required();
  search_cmd->add_option("--tag", sa.tag);
  search_cmd->add_option("--k1", sa.params.bm25.k1);
  search_cmd->add_option("--b", sa.params.bm25.b);
  search_cmd->add_option("--mu", sa.params.ql.mu);
  search_cmd->add_option("--fb-docs", sa.params.rm3.fb_docs);
  search_cmd->add_option("--fb-terms", sa.params.rm3.fb_terms);
  search_cmd->add_option("--original-weight", sa.params.rm3.original_weight);

  EvaluateArgs va;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a run against qrels");
  eval_cmd->add_option("--run", va.run)->required();
  eval_cmd->add_option("--qrels", va.qrels)->required();
  eval_cmd->add_option("--cutoffs", va.cutoffs, "Comma-separated K values");
  eval_cmd->add_option("--mrr-cutoff", va.mrr_cutoff);
  eval_cmd->add_option("--threshold", va.threshold, "Minimum relevant grade");
  eval_cmd->add_flag("--antique", va.antique, "Use the ANTIQUE threshold (3)");
  eval_cmd->add_flag("--linear-gain", va.linear_gain, "NDCG gain = grade");
  eval_cmd->add_flag("--per-query", va.per_query);
  eval_cmd->add_option("--format", va.format)->check(CLI::IsMember({"tsv", "json"}));

  std::string expanded_path;
  auto* div_cmd = app.add_subcommand("diversity", "Lexical diversity of generated text");
  div_cmd->add_option("--expanded", expanded_path)->required();

  SampleArgs pa;
  auto* sample_cmd = app.add_subcommand("sample", "Seeded uniform sample of a collection");
  sample_cmd->add_option("--input", pa.input)->required();
  sample_cmd->add_option("--output", pa.output)->required();
  sample_cmd->add_option("--count", pa.count)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("udeg", sink);
  log.set_pattern("[%l] %v");
  log.set_level(spdlog::level::from_str(g.log_level));

  try {
    if (*index_cmd) return cmd_index(ia, g, log);
    if (*expand_cmd) return cmd_expand(ea, g, out, log);
    if (*search_cmd) return cmd_search(sa, g, log);
    if (*eval_cmd) return cmd_evaluate(va, out, log);
    if (*div_cmd) return cmd_diversity(expanded_path, out);
    if (*sample_cmd) return cmd_sample(pa, g, log);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsageError;
  } catch (const std::exception& e) {
    log.error("{}", e.what());
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace udeg::cli
