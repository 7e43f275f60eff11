// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <atomic>
#include <memory>
#include <optional>
#include <thread>

#include "udeg/analysis.hpp"
#include "udeg/corpus.hpp"
#include "udeg/eval.hpp"
#include "udeg/expansion.hpp"
#include "udeg/index.hpp"
#include "udeg/lexrank.hpp"
#include "udeg/retrieval.hpp"

namespace py = pybind11;
using namespace udeg;
using py::arg;

namespace {

using DocPairs = std::vector<std::pair<std::string, std::string>>;

corpus::Collection to_docs(const DocPairs& pairs) {
  corpus::Collection docs;
  docs.reserve(pairs.size());
  for (const auto& [id, text] : pairs) docs.push_back({id, text});
  return docs;
}

py::list ranked_to_list(const retrieval::RankedList& r) {
  py::list out;
  for (const auto& e : r.entries) out.append(py::make_tuple(e.doc_id, e.score));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "udeg core bindings";

  m.def("tokenize",
        [](const std::string& text, bool lowercase, bool stemming, bool stopwords) {
          return analysis::tokenize(text, {lowercase, stemming, stopwords});
        },
        arg("text"), arg("lowercase") = true, arg("stemming") = true, arg("stopwords") = true);
  m.def("split_sentences", &analysis::split_sentences, arg("text"));
  m.def("porter_stem", &analysis::porter_stem, arg("word"));

  py::class_<index::InvertedIndex, std::unique_ptr<index::InvertedIndex>>(m, "Index")
      .def_static(
          "build",
          [](const DocPairs& docs, bool lowercase, bool stemming, bool stopwords,
             unsigned parallelism) {
            const auto collection = to_docs(docs);
            py::gil_scoped_release release;
            return std::make_unique<index::InvertedIndex>(index::InvertedIndex::build(
                collection, {lowercase, stemming, stopwords}, parallelism));
          },
          arg("docs"), arg("lowercase") = true, arg("stemming") = true,
          arg("stopwords") = true, arg("parallelism") = 1,
          "Builds an index from (doc_id, text) pairs.")
      .def_static(
          "load",
          [](const std::filesystem::path& path) {
            return std::make_unique<index::InvertedIndex>(index::InvertedIndex::load(path));
          },
          arg("path"))
      .def("save", &index::InvertedIndex::save, arg("path"))
      .def_property_readonly("num_docs", &index::InvertedIndex::num_docs)
      .def_property_readonly("num_terms", &index::InvertedIndex::num_terms)
      .def_property_readonly("total_tokens", &index::InvertedIndex::total_tokens)
      .def_property_readonly("avgdl", &index::InvertedIndex::avgdl)
      .def("doc_frequency", &index::InvertedIndex::doc_frequency, arg("term"))
      .def("term_frequency",
           py::overload_cast<std::string_view, std::string_view>(
               &index::InvertedIndex::term_frequency, py::const_),
           arg("term"), arg("doc_id"))
      .def(
          "search",
          [](const index::InvertedIndex& idx, const std::string& query, const std::string& scorer,
             std::size_t k, bool rm3, double k1, double b, double mu, int fb_docs, int fb_terms,
             double original_weight) {
            retrieval::ScorerParams params;
            params.bm25 = {k1, b};
            params.ql.mu = mu;
            params.rm3 = {fb_docs, fb_terms, original_weight};
            params.validate();
            const auto s = retrieval::parse_scorer(scorer);
            retrieval::RankedList r;
            {
              py::gil_scoped_release release;
              r = rm3 ? retrieval::search_rm3(idx, "q", query, s, params, k)
                      : retrieval::search(idx, "q", query, s, params, k);
            }
            return ranked_to_list(r);
          },
          arg("query"), arg("scorer") = "bm25", arg("k") = 10, arg("rm3") = false,
          arg("k1") = 0.9, arg("b") = 0.4, arg("mu") = 1000.0, arg("fb_docs") = 10,
          arg("fb_terms") = 10, arg("original_weight") = 0.5,
          "Returns [(doc_id, score)] best first.")
      .def(
          "bm25_score",
          [](const index::InvertedIndex& idx, const std::vector<std::string>& tokens,
             const std::string& doc_id, double k1, double b) {
            return retrieval::bm25_score(idx, tokens, doc_id, {k1, b});
          },
          arg("tokens"), arg("doc_id"), arg("k1") = 0.9, arg("b") = 0.4)
      .def(
          "ql_score",
          [](const index::InvertedIndex& idx, const std::vector<std::string>& tokens,
             const std::string& doc_id, double mu) {
            return retrieval::ql_score(idx, tokens, doc_id, {mu});
          },
          arg("tokens"), arg("doc_id"), arg("mu") = 1000.0);

  m.def(
      "evaluate",
      [](const std::vector<std::tuple<std::string, std::string, int, double>>& run,
         const std::map<std::string, std::map<std::string, int>>& qrels,
         const std::vector<int>& cutoffs, int threshold, std::optional<int> mrr_cutoff,
         bool linear_gain) {
        std::vector<corpus::RunEntry> entries;
        entries.reserve(run.size());
        for (const auto& [q, d, rank, score] : run) entries.push_back({q, d, rank, score, "py"});
        corpus::Qrels judged;
        for (const auto& [q, docs] : qrels) {
          for (const auto& [d, g] : docs) judged.set(q, d, g);
        }
        eval::EvalConfig config;
        config.cutoffs = cutoffs;
        config.relevance_threshold = threshold;
        config.mrr_cutoff = mrr_cutoff;
        config.gain = linear_gain ? eval::Gain::linear : eval::Gain::exponential;
        const auto report = eval::evaluate_run(entries, judged, config);
        py::dict per_query;
        for (const auto& q : report.per_query) per_query[py::str(q.query_id)] = q.values;
        py::dict out;
        out["aggregate"] = report.aggregate;
        out["per_query"] = per_query;
        out["queries_evaluated"] = report.queries_evaluated;
        out["no_judgment"] = report.no_judgment;
        out["zero_relevant"] = report.zero_relevant;
        return out;
      },
      arg("run"), arg("qrels"), arg("cutoffs") = std::vector<int>{1, 5, 10},
      arg("threshold") = 1, arg("mrr_cutoff") = py::none(), arg("linear_gain") = false,
      "run: [(query_id, doc_id, rank, score)]; qrels: {query_id: {doc_id: grade}}.");

  m.def(
      "lexical_diversity",
      [](const std::vector<std::vector<std::string>>& generated) {
        std::vector<corpus::ExpandedDocument> docs;
        docs.reserve(generated.size());
        for (const auto& g : generated) docs.push_back({"", "", g});
        return eval::lexical_diversity(docs);
      },
      arg("generated"), "Mean unique/total unigram ratio over per-document sentence lists.");

  m.def(
      "lexrank_extract",
      [](const std::string& text, std::size_t count) {
        return expansion::lexrank_extract(text, count, analysis::AnalyzerConfig{});
      },
      arg("text"), arg("count") = 1);

  m.def(
      "expand",
      [](const DocPairs& pairs, const std::string& generator,
         const std::optional<expansion::SynonymTable>& synonyms, int num_sequences,
         std::optional<std::uint64_t> seed, int sentences_per_sequence,
         const std::optional<std::string>& endpoint, const std::string& strategy,
         unsigned parallelism) {
        expansion::GeneratorSpec spec;
        spec.kind = expansion::parse_generator_kind(generator);
        spec.num_sequences = num_sequences;
        spec.seed = seed;
        spec.sentences_per_sequence = sentences_per_sequence;
        spec.strategy = expansion::parse_strategy(strategy);
        std::optional<expansion::RemoteConfig> remote;
        if (endpoint) {
          remote.emplace();
          remote->endpoint = *endpoint;
        }
        const analysis::AnalyzerConfig analyzer;
        const auto gen = expansion::make_generator(spec, analyzer, synonyms ? &*synonyms : nullptr,
                                                   remote ? &*remote : nullptr);
        const auto docs = to_docs(pairs);
        std::vector<expansion::ExpansionResult> results(docs.size());
        {
          py::gil_scoped_release release;
          std::atomic<std::size_t> next{0};
          auto work = [&] {
            for (std::size_t i = next++; i < docs.size(); i = next++) {
              try {
                results[i] = expansion::expand_document(docs[i], *gen, analyzer);
              } catch (const std::exception& e) {
                results[i].doc_id = docs[i].id;
                results[i].expanded_text = docs[i].text;
                results[i].failed = true;
                results[i].error = e.what();
              }
            }
          };
          std::vector<std::jthread> pool;
          for (unsigned w = 1; w < parallelism; ++w) pool.emplace_back(work);
          work();
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.doc_id;
          d["sequences"] = r.sequences;
          d["generated_tokens"] = r.generated_tokens;
          d["novel_tokens"] = r.novel_tokens;
          d["expanded_text"] = r.expanded_text;
          d["failed"] = r.failed;
          d["error"] = r.error;
          out.append(d);
        }
        return out;
      },
      arg("docs"), arg("generator") = "lexrank", arg("synonyms") = py::none(),
      arg("num_sequences") = 4, arg("seed") = py::none(), arg("sentences_per_sequence") = 1,
      arg("endpoint") = py::none(), arg("strategy") = "beam", arg("parallelism") = 1,
      "Expands (doc_id, text) pairs; returns one dict per document.");
}
