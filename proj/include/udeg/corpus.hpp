// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace udeg::corpus {

/// Raised for malformed input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Document {
  std::string id;
  std::string text;
  friend bool operator==(const Document&, const Document&) = default;
};

struct Query {
  std::string id;
  std::string text;
  friend bool operator==(const Query&, const Query&) = default;
};

using Collection = std::vector<Document>;
using QuerySet = std::vector<Query>;

/// Graded judgments keyed by query id, then doc id. Missing pairs are grade 0.
class Qrels {
 public:
  using Judgments = std::map<std::string, std::map<std::string, int>>;

  void set(const std::string& query_id, const std::string& doc_id, int grade);
  int grade(const std::string& query_id, const std::string& doc_id) const;
  bool has_query(const std::string& query_id) const;
  /// Judgments for one query; empty map when the query is unjudged.
  const std::map<std::string, int>& for_query(const std::string& query_id) const;

  const Judgments& judgments() const noexcept { return judgments_; }
  std::size_t size() const noexcept;
  /// Number of (query, doc) pairs that appeared more than once while loading.
  std::size_t duplicate_count() const noexcept { return duplicates_; }

 private:
  friend Qrels load_qrels(const std::filesystem::path&);
  Judgments judgments_;
  std::size_t duplicates_ = 0;
};

struct RunEntry {
  std::string query_id;
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  std::string tag;
  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// d̄ in persisted form: original text plus the generated sentences.
struct ExpandedDocument {
  std::string id;
  std::string contents;
  std::vector<std::string> generated;

  /// Generated sentences first, then the original text, space separated.
  std::string expanded_text() const;
  friend bool operator==(const ExpandedDocument&, const ExpandedDocument&) = default;
};

Collection load_collection_tsv(const std::filesystem::path& path);
void write_collection_tsv(const Collection& docs, const std::filesystem::path& path);

QuerySet load_queries_tsv(const std::filesystem::path& path);
void write_queries_tsv(const QuerySet& queries, const std::filesystem::path& path);

/// `qid 0 docid grade` per line. Duplicate pairs keep the last grade.
Qrels load_qrels(const std::filesystem::path& path);
void write_qrels(const Qrels& qrels, const std::filesystem::path& path);

/// Formats one run line: `qid Q0 docid rank score tag`, score with 6 decimals.
std::string format_run_line(const RunEntry& entry);

/// Validates that per query ranks are 1..n in file order and scores are
/// non-increasing; throws std::invalid_argument otherwise.
void validate_run(const std::vector<RunEntry>& entries);
void write_run(const std::vector<RunEntry>& entries, const std::filesystem::path& path);
std::vector<RunEntry> read_run(const std::filesystem::path& path);

std::string to_jsonl_line(const ExpandedDocument& doc);
ExpandedDocument from_jsonl_line(const std::string& line, std::size_t line_no = 0);
void write_expanded_jsonl(const std::vector<ExpandedDocument>& docs,
                          const std::filesystem::path& path);
std::vector<ExpandedDocument> read_expanded_jsonl(const std::filesystem::path& path);

/// Expanded documents as an indexable collection (text = expanded_text()).
Collection to_collection(const std::vector<ExpandedDocument>& docs);

/// Uniform sample of `count` documents without replacement, seeded, returned
/// in original collection order.
Collection sample_collection(const Collection& docs, std::size_t count,
                             std::uint64_t seed);

}  // namespace udeg::corpus
