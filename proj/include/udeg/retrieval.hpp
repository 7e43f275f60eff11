// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "udeg/corpus.hpp"
#include "udeg/index.hpp"

namespace udeg::retrieval {

enum class Scorer { bm25, ql };

std::string_view to_string(Scorer s);
/// Parses "bm25" or "ql"; throws std::invalid_argument otherwise.
Scorer parse_scorer(std::string_view name);

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct QlParams {
  double mu = 1000.0;
};

struct Rm3Params {
  int fb_docs = 10;
  int fb_terms = 10;
  double original_weight = 0.5;
};

struct ScorerParams {
  Bm25Params bm25;
  QlParams ql;
  Rm3Params rm3;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

/// A query token's contribution to QL when it never occurs in the collection.
inline constexpr double kQlZeroProbFloor = 1e-12;

struct WeightedTerm {
  std::string term;
  double weight = 1.0;
  friend bool operator==(const WeightedTerm&, const WeightedTerm&) = default;
};
using WeightedQuery = std::vector<WeightedTerm>;

/// Each token with weight 1, order and duplicates preserved.
WeightedQuery unweighted(std::span<const std::string> tokens);

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Descending score, ties by doc id ascending, no duplicate doc ids.
struct RankedList {
  std::string query_id;
  std::vector<ScoredDoc> entries;
};

double bm25_score(const index::InvertedIndex& index,
                  std::span<const std::string> query_tokens,
                  std::string_view doc_id, const Bm25Params& params = {});

double ql_score(const index::InvertedIndex& index,
                std::span<const std::string> query_tokens,
                std::string_view doc_id, const QlParams& params = {});

/// Σ weight · per-term contribution for the chosen scorer.
double score(const index::InvertedIndex& index, const WeightedQuery& query,
             index::DocOrdinal doc, Scorer scorer, const ScorerParams& params);

/// Top-k over documents sharing at least one positively weighted term with
/// the query. Zero-weight terms are ignored entirely.
RankedList weighted_search(const index::InvertedIndex& index, std::string query_id,
                           const WeightedQuery& query, Scorer scorer,
                           const ScorerParams& params, std::size_t k);

/// Analyzes `query_text` with the index's analyzer and runs an unweighted
/// search. A query that analyzes to nothing yields an empty list.
RankedList search(const index::InvertedIndex& index, std::string query_id,
                  std::string_view query_text, Scorer scorer,
                  const ScorerParams& params, std::size_t k);

/// Maximum-likelihood query model: count / length per distinct token, sorted
/// by term.
WeightedQuery mle_query(std::span<const std::string> query_tokens);

/// RM3: interpolates the query MLE with a relevance model estimated from the
/// top `fb_docs` documents of `first_pass`, weighted by a softmax over their
/// scores and truncated to `fb_terms` terms. Terms with zero final weight are
/// dropped; the result is sorted by term.
WeightedQuery rm3_expand(const index::InvertedIndex& index,
                         std::span<const std::string> query_tokens,
                         const RankedList& first_pass, const Rm3Params& params);

/// First-pass search, RM3 expansion, then weighted second-pass search.
RankedList search_rm3(const index::InvertedIndex& index, std::string query_id,
                      std::string_view query_text, Scorer scorer,
                      const ScorerParams& params, std::size_t k);

std::vector<corpus::RunEntry> to_run_entries(const RankedList& list,
                                             const std::string& tag);

}  // namespace udeg::retrieval
