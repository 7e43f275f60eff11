// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "udeg/analysis.hpp"
#include "udeg/corpus.hpp"
#include "udeg/lexrank.hpp"

namespace udeg::expansion {

enum class GeneratorKind { lexrank, mock_synonym, remote_abstractive };
enum class Strategy { beam, mc_dropout, top_k };

std::string_view to_string(GeneratorKind kind);
std::string_view to_string(Strategy strategy);
/// Accepts "lexrank", "mock" / "mock-synonym", "remote" / "remote-abstractive".
GeneratorKind parse_generator_kind(std::string_view name);
/// Accepts "beam", "mc-dropout", "top-k".
Strategy parse_strategy(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::lexrank;
  int num_sequences = 4;  // S
  Strategy strategy = Strategy::beam;
  int beam_size = 8;
  int top_k = 50;
  int max_length = 64;
  std::optional<std::uint64_t> seed;
  int sentences_per_sequence = 1;

  void validate() const;
};

/// Raised when a generator cannot produce sequences for one document.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(std::string doc_id, const std::string& what);
  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

/// g(d; θ): maps a document to its generated sequences. Implementations must
/// be safe to call concurrently.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::vector<std::string> generate(const corpus::Document& doc) const = 0;
  /// True when the same document always yields the same sequences.
  virtual bool deterministic() const = 0;
  virtual std::string name() const = 0;
};

/// Extractive: one sequence made of the top-ranked LexRank sentences.
class LexRankGenerator final : public Generator {
 public:
  LexRankGenerator(int sentences_per_sequence, analysis::AnalyzerConfig analyzer,
                   LexRankParams params = {});
  std::vector<std::string> generate(const corpus::Document& doc) const override;
  bool deterministic() const override { return true; }
  std::string name() const override { return "lexrank"; }

 private:
  int sentences_per_sequence_;
  analysis::AnalyzerConfig analyzer_;
  LexRankParams params_;
};

using SynonymTable = std::unordered_map<std::string, std::vector<std::string>>;

/// Reads `token<TAB>syn1,syn2` lines. Keys are lowercased.
SynonymTable load_synonym_table(const std::filesystem::path& path);

/// Deterministic stand-in for an abstractive generator. Each of the S
/// sentences replaces every document token found in the table with one of
/// its synonyms, drawn from an RNG seeded by (seed, doc id, sentence index).
class MockSynonymGenerator final : public Generator {
 public:
  MockSynonymGenerator(SynonymTable table, int num_sequences, std::uint64_t seed);
  std::vector<std::string> generate(const corpus::Document& doc) const override;
  bool deterministic() const override { return true; }
  std::string name() const override { return "mock-synonym"; }

 private:
  SynonymTable table_;
  int num_sequences_;
  std::uint64_t seed_;
};

struct RemoteConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8000
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds timeout{60000};
  int max_in_flight = 4;
};

/// Environment variable consulted when no endpoint flag is given.
inline constexpr const char* kEndpointEnv = "UDEG_GENERATOR_ENDPOINT";

/// JSON body of POST /generate for one document.
std::string make_generation_request(std::string_view text, const GeneratorSpec& spec);
/// Parses a /generate response body; throws std::runtime_error when the body
/// is malformed or does not carry exactly `expected` sentences.
std::vector<std::string> parse_generation_response(std::string_view body,
                                                   std::size_t expected);

/// Client of the generation service. Transport errors, 429 and 5xx responses
/// are retried with exponential backoff; other failures throw immediately.
class RemoteGenerator final : public Generator {
 public:
  RemoteGenerator(RemoteConfig config, GeneratorSpec spec);
  ~RemoteGenerator() override;
  std::vector<std::string> generate(const corpus::Document& doc) const override;
  bool deterministic() const override;
  std::string name() const override { return "remote"; }

 private:
  RemoteConfig config_;
  GeneratorSpec spec_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

/// Builds the generator named by `spec.kind`. `synonyms` is required for the
/// mock generator and `remote` for the remote one.
std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec,
                                          const analysis::AnalyzerConfig& analyzer,
                                          const SynonymTable* synonyms = nullptr,
                                          const RemoteConfig* remote = nullptr);

struct ExpansionResult {
  std::string doc_id;
  std::vector<std::string> sequences;
  std::size_t generated_tokens = 0;  // K
  std::size_t novel_tokens = 0;      // N
  std::string expanded_text;         // d̄ = sequences ⊕ original text
  bool failed = false;
  std::string error;

  corpus::ExpandedDocument to_expanded(const corpus::Document& original) const;
};

/// Joins the sequences and prepends them to `text` (plain `text` when there
/// are no sequences).
std::string concatenate(const std::vector<std::string>& sequences, std::string_view text);

/// Counts K (all generated tokens) and N (generated tokens absent from the
/// original document's token set) with `analyzer`.
void count_novel_terms(const std::vector<std::string>& sequences, std::string_view text,
                       const analysis::AnalyzerConfig& analyzer, std::size_t& k,
                       std::size_t& n);

/// Runs the generator on one document. Generator failures are rethrown as
/// GenerationError carrying the document id.
ExpansionResult expand_document(const corpus::Document& doc, const Generator& generator,
                                const analysis::AnalyzerConfig& analyzer);

struct ExpansionSummary {
  std::size_t docs_processed = 0;
  std::size_t failures = 0;
  double mean_generated = 0.0;   // mean K
  double mean_novel = 0.0;       // mean N
  double mean_novelty_ratio = 0.0;  // mean N/K over documents with K > 0
  std::vector<std::pair<std::string, std::string>> failed;  // (doc id, error)
};

/// Expands every document and writes the JSONL records in input order, for
/// any `parallelism`. A failed document is written with no generated
/// sentences and listed in the summary.
ExpansionSummary expand_collection(const corpus::Collection& docs, const Generator& generator,
                                   const analysis::AnalyzerConfig& analyzer,
                                   std::ostream& out, unsigned parallelism = 1);
ExpansionSummary expand_collection(const corpus::Collection& docs, const Generator& generator,
                                   const analysis::AnalyzerConfig& analyzer,
                                   const std::filesystem::path& output,
                                   unsigned parallelism = 1);

}  // namespace udeg::expansion
