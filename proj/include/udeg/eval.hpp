// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "udeg/corpus.hpp"

namespace udeg::eval {

enum class Gain { exponential, linear };

struct EvalConfig {
  /// Grades at or above this count as relevant for binary metrics.
  int relevance_threshold = 1;
  std::vector<int> cutoffs = {1, 5, 10};
  std::optional<int> mrr_cutoff;
  Gain gain = Gain::exponential;

  void validate() const;
};

/// Relevance threshold conventionally used for ANTIQUE's 1-4 graded labels.
inline constexpr int kAntiqueRelevanceThreshold = 3;

using Judgments = std::map<std::string, int>;

std::size_t count_relevant(const Judgments& judgments, const EvalConfig& config);

double reciprocal_rank(std::span<const std::string> ranked, const Judgments& judgments,
                       const EvalConfig& config);
/// Denominator is `k` even when the list is shorter.
double precision_at_k(std::span<const std::string> ranked, const Judgments& judgments,
                      int k, const EvalConfig& config);
/// 0 when the query has no relevant documents (callers skip such queries).
double recall_at_k(std::span<const std::string> ranked, const Judgments& judgments, int k,
                   const EvalConfig& config);
double average_precision(std::span<const std::string> ranked, const Judgments& judgments,
                         const EvalConfig& config);
double ndcg_at_k(std::span<const std::string> ranked, const Judgments& judgments, int k,
                 const EvalConfig& config);

struct QueryMetrics {
  std::string query_id;
  std::map<std::string, double> values;
  bool has_relevant = false;
};

struct MetricReport {
  std::vector<std::string> metric_names;  // display order
  std::vector<QueryMetrics> per_query;    // sorted by query id
  std::map<std::string, double> aggregate;
  std::size_t queries_evaluated = 0;
  /// Run queries with no judgments at all; skipped.
  std::size_t no_judgment = 0;
  /// Judged queries with no relevant document; excluded from recall and MAP.
  std::size_t zero_relevant = 0;

  /// `metric<TAB>query<TAB>value` lines; aggregates use the query id "all".
  std::string to_tsv(bool per_query = false) const;
  std::string to_json(bool per_query = true) const;
};

std::vector<std::string> metric_names(const EvalConfig& config);

MetricReport evaluate_run(const std::vector<corpus::RunEntry>& run, const corpus::Qrels& qrels,
                          const EvalConfig& config);

/// Unique / total unigrams over one document's generated sentences (lowercase
/// only); nullopt when they contain no token.
std::optional<double> document_diversity(const std::vector<std::string>& generated);

/// Mean document_diversity over documents with at least one generated token.
double lexical_diversity(const std::vector<corpus::ExpandedDocument>& docs);

}  // namespace udeg::eval
