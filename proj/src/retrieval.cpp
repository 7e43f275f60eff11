// SPDX-License-Identifier: Apache-2.0
#include "udeg/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace udeg::retrieval {
namespace {

using index::DocOrdinal;
using index::InvertedIndex;
using index::TermId;

// Per-query-term statistics that do not depend on the document.
struct TermStats {
  std::optional<TermId> id;
  double weight = 1.0;
  double idf = 0.0;         // BM25
  double coll_prob = 0.0;   // QL
};

// Zero-weight terms are dropped: they neither score nor generate candidates.
std::vector<TermStats> prepare(const InvertedIndex& index, const WeightedQuery& query) {
  std::vector<TermStats> stats;
  stats.reserve(query.size());
  const double n = static_cast<double>(index.num_docs());
  for (const auto& wt : query) {
    if (wt.weight == 0.0) continue;
    TermStats s;
    s.id = index.term_id(wt.term);
    s.weight = wt.weight;
    if (s.id) {
      const double df = static_cast<double>(index.postings(*s.id).size());
      s.idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      s.coll_prob = index.collection_prob(*s.id);
    }
    stats.push_back(s);
  }
  return stats;
}

double bm25_term(const TermStats& s, std::uint32_t tf, double dl, double avgdl,
                 const Bm25Params& p) {
  if (tf == 0) return 0.0;
  const double f = static_cast<double>(tf);
  const double norm = p.k1 * (1.0 - p.b + p.b * dl / avgdl);
  return s.idf * f * (p.k1 + 1.0) / (f + norm);
}

double ql_term(const TermStats& s, std::uint32_t tf, double dl, const QlParams& p) {
  if (s.coll_prob == 0.0) return std::log(kQlZeroProbFloor);
  return std::log((static_cast<double>(tf) + p.mu * s.coll_prob) / (dl + p.mu));
}

// The single scoring routine used by both direct scoring and search, so the
// two paths produce bit-identical values.
template <typename TfAt>
double score_terms(const InvertedIndex& index, std::span<const TermStats> stats,
                   DocOrdinal doc, TfAt tf_at, Scorer scorer, const ScorerParams& params) {
  const double dl = index.doc_length(doc);
  const double avgdl = index.avgdl();
  double total = 0.0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const std::uint32_t tf = tf_at(i);
    const double c = scorer == Scorer::bm25 ? bm25_term(stats[i], tf, dl, avgdl, params.bm25)
                                            : ql_term(stats[i], tf, dl, params.ql);
    total += stats[i].weight * c;
  }
  return total;
}

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

}  // namespace

std::string_view to_string(Scorer s) { return s == Scorer::bm25 ? "bm25" : "ql"; }

Scorer parse_scorer(std::string_view name) {
  if (name == "bm25") return Scorer::bm25;
  if (name == "ql") return Scorer::ql;
  throw std::invalid_argument("unknown scorer '" + std::string(name) + "'");
}

void ScorerParams::validate() const {
  if (!(bm25.k1 >= 0.0)) throw std::invalid_argument("bm25 k1 must be >= 0");
  if (!(bm25.b >= 0.0 && bm25.b <= 1.0)) throw std::invalid_argument("bm25 b must be in [0,1]");
  if (!(ql.mu > 0.0)) throw std::invalid_argument("ql mu must be > 0");
  if (rm3.fb_docs < 0) throw std::invalid_argument("rm3 fb-docs must be >= 0");
  if (rm3.fb_terms < 1) throw std::invalid_argument("rm3 fb-terms must be >= 1");
  if (!(rm3.original_weight >= 0.0 && rm3.original_weight <= 1.0)) {
    throw std::invalid_argument("rm3 original-weight must be in [0,1]");
  }
}

WeightedQuery unweighted(std::span<const std::string> tokens) {
  WeightedQuery q;
  q.reserve(tokens.size());
  for (const auto& t : tokens) q.push_back({t, 1.0});
  return q;
}

double score(const InvertedIndex& index, const WeightedQuery& query, DocOrdinal doc,
             Scorer scorer, const ScorerParams& params) {
  if (doc >= index.num_docs()) throw std::out_of_range("document ordinal out of range");
  const auto stats = prepare(index, query);
  return score_terms(
      index, stats, doc,
      [&](std::size_t i) { return stats[i].id ? index.term_frequency(*stats[i].id, doc) : 0u; },
      scorer, params);
}

double bm25_score(const InvertedIndex& index, std::span<const std::string> query_tokens,
                  std::string_view doc_id, const Bm25Params& params) {
  ScorerParams p;
  p.bm25 = params;
  return score(index, unweighted(query_tokens), index.require_ordinal(doc_id),
               Scorer::bm25, p);
}

double ql_score(const InvertedIndex& index, std::span<const std::string> query_tokens,
                std::string_view doc_id, const QlParams& params) {
  ScorerParams p;
  p.ql = params;
  return score(index, unweighted(query_tokens), index.require_ordinal(doc_id),
               Scorer::ql, p);
}

RankedList weighted_search(const InvertedIndex& index, std::string query_id,
                           const WeightedQuery& query, Scorer scorer,
                           const ScorerParams& params, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  RankedList result{std::move(query_id), {}};
  const auto stats = prepare(index, query);
  if (stats.empty()) return result;

  // Candidate generation: every document with a posting for a query term.
  // `slot` maps ordinal -> candidate row; reused per thread and reset after.
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  thread_local std::vector<std::uint32_t> slot;
  if (slot.size() < index.num_docs()) slot.resize(index.num_docs(), kNone);

  const std::size_t width = stats.size();
  std::vector<DocOrdinal> candidates;
  std::vector<std::uint32_t> tfs;
  for (std::size_t i = 0; i < width; ++i) {
    if (!stats[i].id) continue;
    for (const auto& p : index.postings(*stats[i].id)) {
      std::uint32_t row = slot[p.doc];
      if (row == kNone) {
        row = static_cast<std::uint32_t>(candidates.size());
        slot[p.doc] = row;
        candidates.push_back(p.doc);
        tfs.resize(tfs.size() + width, 0);
      }
      tfs[row * width + i] += p.tf;
    }
  }

  std::vector<ScoredDoc> scored;
  scored.reserve(candidates.size());
  for (std::size_t row = 0; row < candidates.size(); ++row) {
    const DocOrdinal doc = candidates[row];
    slot[doc] = kNone;
    const double s = score_terms(
        index, stats, doc, [&](std::size_t i) { return tfs[row * width + i]; }, scorer,
        params);
    scored.push_back({index.doc_id(doc), s});
  }

  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), ranks_before);
  scored.resize(keep);
  result.entries = std::move(scored);
  return result;
}

RankedList search(const InvertedIndex& index, std::string query_id,
                  std::string_view query_text, Scorer scorer, const ScorerParams& params,
                  std::size_t k) {
  const auto tokens = analysis::tokenize(query_text, index.analyzer());
  return weighted_search(index, std::move(query_id), unweighted(tokens), scorer, params, k);
}

WeightedQuery mle_query(std::span<const std::string> query_tokens) {
  std::map<std::string, double> counts;
  for (const auto& t : query_tokens) counts[t] += 1.0;
  WeightedQuery q;
  const double n = static_cast<double>(query_tokens.size());
  for (const auto& [t, c] : counts) q.push_back({t, c / n});
  return q;
}

WeightedQuery rm3_expand(const InvertedIndex& index,
                         std::span<const std::string> query_tokens,
                         const RankedList& first_pass, const Rm3Params& params) {
  const auto original = mle_query(query_tokens);
  const std::size_t fb = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(params.fb_docs, 0)), first_pass.entries.size());
  if (fb == 0) return original;

  // Softmax over the feedback documents' scores.
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fb; ++i) max_score = std::max(max_score, first_pass.entries[i].score);
  std::vector<double> doc_weight(fb);
  double z = 0.0;
  for (std::size_t i = 0; i < fb; ++i) {
    doc_weight[i] = std::exp(first_pass.entries[i].score - max_score);
    z += doc_weight[i];
  }

  std::map<TermId, double> relevance;
  for (std::size_t i = 0; i < fb; ++i) {
    const DocOrdinal doc = index.require_ordinal(first_pass.entries[i].doc_id);
    const double dl = index.doc_length(doc);
    if (dl == 0.0) continue;
    const double w = doc_weight[i] / z;
    for (const auto& tc : index.doc_terms(doc)) {
      relevance[tc.term] += w * static_cast<double>(tc.tf) / dl;
    }
  }

  std::vector<std::pair<std::string, double>> model;
  model.reserve(relevance.size());
  for (const auto& [t, w] : relevance) model.emplace_back(index.term(t), w);
  std::sort(model.begin(), model.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (model.size() > static_cast<std::size_t>(params.fb_terms)) {
    model.resize(static_cast<std::size_t>(params.fb_terms));
  }
  double mass = 0.0;
  for (const auto& [_, w] : model) mass += w;

  const double alpha = params.original_weight;
  std::map<std::string, double> combined;
  for (const auto& wt : original) combined[wt.term] += alpha * wt.weight;
  if (mass > 0.0) {
    for (const auto& [t, w] : model) combined[t] += (1.0 - alpha) * (w / mass);
  }

  WeightedQuery out;
  for (const auto& [t, w] : combined) {
    if (w > 0.0) out.push_back({t, w});
  }
  return out;
}

RankedList search_rm3(const InvertedIndex& index, std::string query_id,
                      std::string_view query_text, Scorer scorer, const ScorerParams& params,
                      std::size_t k) {
  const auto tokens = analysis::tokenize(query_text, index.analyzer());
  if (tokens.empty()) return RankedList{std::move(query_id), {}};
  const std::size_t fb_k = static_cast<std::size_t>(std::max(params.rm3.fb_docs, 1));
  const auto first = weighted_search(index, query_id, unweighted(tokens), scorer, params, fb_k);
  const auto expanded = rm3_expand(index, tokens, first, params.rm3);
  return weighted_search(index, std::move(query_id), expanded, scorer, params, k);
}

std::vector<corpus::RunEntry> to_run_entries(const RankedList& list, const std::string& tag) {
  std::vector<corpus::RunEntry> out;
  out.reserve(list.entries.size());
  int rank = 1;
  for (const auto& e : list.entries) {
    out.push_back({list.query_id, e.doc_id, rank++, e.score, tag});
  }
  return out;
}

}  // namespace udeg::retrieval
