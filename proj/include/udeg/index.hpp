// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "udeg/analysis.hpp"
#include "udeg/corpus.hpp"

namespace udeg::index {

using DocOrdinal = std::uint32_t;
using TermId = std::uint32_t;

struct Posting {
  DocOrdinal doc;
  std::uint32_t tf;
  friend bool operator==(const Posting&, const Posting&) = default;
};

struct TermCount {
  TermId term;
  std::uint32_t tf;
  friend bool operator==(const TermCount&, const TermCount&) = default;
};

/// Snapshot layout version written by save().
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Immutable in-memory inverted index. Terms are stored in lexicographic
/// order; doc ordinals follow collection order. Both orders are stable, so
/// rebuilding from the same collection yields an identical snapshot.
class InvertedIndex {
 public:
  // Lookup tables hold views into the term and id arrays, so the index is
  // move-only.
  InvertedIndex(const InvertedIndex&) = delete;
  InvertedIndex& operator=(const InvertedIndex&) = delete;
  InvertedIndex(InvertedIndex&&) noexcept = default;
  InvertedIndex& operator=(InvertedIndex&&) noexcept = default;

  /// Throws std::invalid_argument on an empty collection. `parallelism` only
  /// affects build speed; the result is identical for every value.
  static InvertedIndex build(const corpus::Collection& docs,
                             const analysis::AnalyzerConfig& config,
                             unsigned parallelism = 1);

  static InvertedIndex load(const std::filesystem::path& path);
  static InvertedIndex read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  void write(std::ostream& out) const;

  std::size_t num_docs() const noexcept { return doc_ids_.size(); }
  std::size_t num_terms() const noexcept { return terms_.size(); }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  /// Mean document length; 0 for a collection of empty documents.
  double avgdl() const noexcept;
  const analysis::AnalyzerConfig& analyzer() const noexcept { return config_; }

  std::optional<TermId> term_id(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::span<const Posting> postings(TermId id) const { return postings_.at(id); }
  std::uint64_t collection_count(TermId id) const { return collection_counts_.at(id); }

  std::optional<DocOrdinal> ordinal(std::string_view doc_id) const;
  /// Throws std::out_of_range for an unknown external id.
  DocOrdinal require_ordinal(std::string_view doc_id) const;
  const std::string& doc_id(DocOrdinal doc) const { return doc_ids_.at(doc); }
  std::uint32_t doc_length(DocOrdinal doc) const { return doc_lengths_.at(doc); }
  /// Term counts of one document, sorted by term id.
  std::span<const TermCount> doc_terms(DocOrdinal doc) const {
    return doc_terms_.at(doc);
  }

  std::uint32_t doc_frequency(std::string_view term) const;
  std::uint32_t term_frequency(std::string_view term, std::string_view doc_id) const;
  std::uint32_t term_frequency(TermId term, DocOrdinal doc) const;
  /// collection count / total tokens; 0 for unseen terms.
  double collection_prob(std::string_view term) const;
  double collection_prob(TermId term) const;

 private:
  InvertedIndex() = default;
  void finalize();

  analysis::AnalyzerConfig config_;
  std::vector<std::string> terms_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::uint64_t> collection_counts_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::uint64_t total_tokens_ = 0;

  // Derived on build/load, not persisted.
  std::unordered_map<std::string_view, TermId> term_lookup_;
  std::unordered_map<std::string_view, DocOrdinal> doc_lookup_;
  std::vector<std::vector<TermCount>> doc_terms_;
};

}  // namespace udeg::index
