// SPDX-License-Identifier: Apache-2.0
#include "udeg/expansion.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_set>

namespace udeg::expansion {

corpus::ExpandedDocument ExpansionResult::to_expanded(const corpus::Document& original) const {
  return {original.id, original.text, sequences};
}

std::string concatenate(const std::vector<std::string>& sequences, std::string_view text) {
  corpus::ExpandedDocument d{"", std::string(text), sequences};
  return d.expanded_text();
}

void count_novel_terms(const std::vector<std::string>& sequences, std::string_view text,
                       const analysis::AnalyzerConfig& analyzer, std::size_t& k,
                       std::size_t& n) {
  const auto doc_tokens = analysis::tokenize(text, analyzer);
  const std::unordered_set<std::string> vocab(doc_tokens.begin(), doc_tokens.end());
  k = 0;
  n = 0;
  for (const auto& s : sequences) {
    for (const auto& tok : analysis::tokenize(s, analyzer)) {
      ++k;
      if (!vocab.count(tok)) ++n;
    }
  }
}

ExpansionResult expand_document(const corpus::Document& doc, const Generator& generator,
                                const analysis::AnalyzerConfig& analyzer) {
  ExpansionResult r;
  r.doc_id = doc.id;
  try {
    r.sequences = generator.generate(doc);
  } catch (const GenerationError&) {
    throw;
  } catch (const std::exception& e) {
    throw GenerationError(doc.id, e.what());
  }
  count_novel_terms(r.sequences, doc.text, analyzer, r.generated_tokens, r.novel_tokens);
  r.expanded_text = concatenate(r.sequences, doc.text);
  return r;
}

namespace {

ExpansionResult expand_or_flag(const corpus::Document& doc, const Generator& generator,
                               const analysis::AnalyzerConfig& analyzer) {
  try {
    return expand_document(doc, generator, analyzer);
  } catch (const std::exception& e) {
    ExpansionResult r;
    r.doc_id = doc.id;
    r.expanded_text = doc.text;
    r.failed = true;
    r.error = e.what();
    return r;
  }
}

class SummaryBuilder {
 public:
  void add(const ExpansionResult& r) {
    ++summary_.docs_processed;
    if (r.failed) {
      ++summary_.failures;
      summary_.failed.emplace_back(r.doc_id, r.error);
    }
    sum_k_ += static_cast<double>(r.generated_tokens);
    sum_n_ += static_cast<double>(r.novel_tokens);
    if (r.generated_tokens > 0) {
      sum_ratio_ += static_cast<double>(r.novel_tokens) / static_cast<double>(r.generated_tokens);
      ++with_k_;
    }
  }

  ExpansionSummary finish() {
    if (summary_.docs_processed > 0) {
      const double n = static_cast<double>(summary_.docs_processed);
      summary_.mean_generated = sum_k_ / n;
      summary_.mean_novel = sum_n_ / n;
    }
    if (with_k_ > 0) summary_.mean_novelty_ratio = sum_ratio_ / static_cast<double>(with_k_);
    return std::move(summary_);
  }

 private:
  ExpansionSummary summary_;
  double sum_k_ = 0.0;
  double sum_n_ = 0.0;
  double sum_ratio_ = 0.0;
  std::size_t with_k_ = 0;
};

}  // namespace

ExpansionSummary expand_collection(const corpus::Collection& docs, const Generator& generator,
                                   const analysis::AnalyzerConfig& analyzer, std::ostream& out,
                                   unsigned parallelism) {
  SummaryBuilder summary;
  auto emit = [&](std::size_t i, const ExpansionResult& r) {
    summary.add(r);
    out << corpus::to_jsonl_line(r.to_expanded(docs[i])) << '\n';
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, parallelism), docs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) emit(i, expand_or_flag(docs[i], generator, analyzer));
    return summary.finish();
  }

  // Workers claim documents in order; the calling thread writes completed
  // results as soon as the next index in input order is available.
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable ready;
  std::map<std::size_t, ExpansionResult> done;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < docs.size(); i = next++) {
          auto r = expand_or_flag(docs[i], generator, analyzer);
          {
            std::lock_guard lock(mu);
            done.emplace(i, std::move(r));
          }
          ready.notify_one();
        }
      });
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
      ExpansionResult r;
      {
        std::unique_lock lock(mu);
        ready.wait(lock, [&] { return done.count(i) > 0; });
        auto node = done.extract(i);
        r = std::move(node.mapped());
      }
      emit(i, r);
    }
  }
  return summary.finish();
}

ExpansionSummary expand_collection(const corpus::Collection& docs, const Generator& generator,
                                   const analysis::AnalyzerConfig& analyzer,
                                   const std::filesystem::path& output, unsigned parallelism) {
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + output.string());
  auto summary = expand_collection(docs, generator, analyzer, out, parallelism);
  if (!out) throw std::runtime_error("failed writing " + output.string());
  return summary;
}

}  // namespace udeg::expansion
