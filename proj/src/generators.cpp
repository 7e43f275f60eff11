// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "udeg/expansion.hpp"

namespace udeg::expansion {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

GenerationError::GenerationError(std::string doc_id, const std::string& what)
    : std::runtime_error("document " + doc_id + ": " + what), doc_id_(std::move(doc_id)) {}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::lexrank: return "lexrank";
    case GeneratorKind::mock_synonym: return "mock-synonym";
    case GeneratorKind::remote_abstractive: return "remote-abstractive";
  }
  return "?";
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::beam: return "beam";
    case Strategy::mc_dropout: return "mc-dropout";
    case Strategy::top_k: return "top-k";
  }
  return "?";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "lexrank") return GeneratorKind::lexrank;
  if (name == "mock" || name == "mock-synonym") return GeneratorKind::mock_synonym;
  if (name == "remote" || name == "remote-abstractive") return GeneratorKind::remote_abstractive;
  throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

Strategy parse_strategy(std::string_view name) {
  if (name == "beam") return Strategy::beam;
  if (name == "mc-dropout") return Strategy::mc_dropout;
  if (name == "top-k") return Strategy::top_k;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void GeneratorSpec::validate() const {
  if (num_sequences < 1) throw std::invalid_argument("num-sequences must be >= 1");
  if (beam_size < 1) throw std::invalid_argument("beam-size must be >= 1");
  if (top_k < 1) throw std::invalid_argument("top-k must be >= 1");
  if (max_length < 1) throw std::invalid_argument("max-length must be >= 1");
  if (sentences_per_sequence < 1) {
    throw std::invalid_argument("sentences-per-sequence must be >= 1");
  }
}

// --- LexRank ---------------------------------------------------------------

LexRankGenerator::LexRankGenerator(int sentences_per_sequence,
                                   analysis::AnalyzerConfig analyzer, LexRankParams params)
    : sentences_per_sequence_(sentences_per_sequence), analyzer_(analyzer), params_(params) {}

std::vector<std::string> LexRankGenerator::generate(const corpus::Document& doc) const {
  auto top = lexrank_extract(doc.text, static_cast<std::size_t>(sentences_per_sequence_),
                             analyzer_, params_);
  if (top.empty()) return {};
  std::string seq = top.front();
  for (std::size_t i = 1; i < top.size(); ++i) {
    seq += ' ';
    seq += top[i];
  }
  return {std::move(seq)};
}

// --- Mock synonyms ---------------------------------------------------------

SynonymTable load_synonym_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  SynonymTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw corpus::ParseError(path.string(), line_no, "expected token<TAB>syn1,syn2");
    }
    auto keys = analysis::tokenize(line.substr(0, tab), analysis::AnalyzerConfig::surface());
    if (keys.size() != 1) {
      throw corpus::ParseError(path.string(), line_no, "key must be a single token");
    }
    auto& syns = table[keys.front()];
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      auto piece = trim(rest.substr(0, comma));
      if (!piece.empty()) syns.push_back(std::move(piece));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return table;
}

MockSynonymGenerator::MockSynonymGenerator(SynonymTable table, int num_sequences,
                                           std::uint64_t seed)
    : table_(std::move(table)), num_sequences_(num_sequences), seed_(seed) {}

std::vector<std::string> MockSynonymGenerator::generate(const corpus::Document& doc) const {
  const auto tokens = analysis::tokenize(doc.text, analysis::AnalyzerConfig::surface());
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(num_sequences_));
  const std::uint64_t doc_seed = splitmix64(seed_ ^ fnv1a(doc.id));
  for (int s = 0; s < num_sequences_; ++s) {
    std::mt19937_64 rng(splitmix64(doc_seed + static_cast<std::uint64_t>(s)));
    std::string sentence;
    for (const auto& tok : tokens) {
      auto it = table_.find(tok);
      if (it == table_.end() || it->second.empty()) continue;
      const auto& syns = it->second;
      if (!sentence.empty()) sentence += ' ';
      sentence += syns[rng() % syns.size()];
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

// --- Remote ----------------------------------------------------------------

std::string make_generation_request(std::string_view text, const GeneratorSpec& spec) {
  nlohmann::ordered_json j;
  j["text"] = std::string(text);
  j["strategy"] = std::string(to_string(spec.strategy));
  j["num_samples"] = spec.num_sequences;
  j["beam_size"] = spec.beam_size;
  j["top_k"] = spec.top_k;
  j["max_length"] = spec.max_length;
  if (spec.seed) {
    j["seed"] = *spec.seed;
  } else {
    j["seed"] = nullptr;
  }
  return j.dump();
}

std::vector<std::string> parse_generation_response(std::string_view body,
                                                   std::size_t expected) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed generation response: ") + e.what());
  }
  auto it = j.find("sentences");
  if (it == j.end() || !it->is_array()) {
    throw std::runtime_error("generation response has no 'sentences' array");
  }
  std::vector<std::string> sentences;
  for (const auto& s : *it) {
    if (!s.is_string()) throw std::runtime_error("generation response: non-string sentence");
    sentences.push_back(s.get<std::string>());
  }
  if (sentences.size() != expected) {
    throw std::runtime_error("generation response has " + std::to_string(sentences.size()) +
                             " sentences, expected " + std::to_string(expected));
  }
  return sentences;
}

RemoteGenerator::RemoteGenerator(RemoteConfig config, GeneratorSpec spec)
    : config_(std::move(config)),
      spec_(spec),
      in_flight_(std::make_unique<std::counting_semaphore<>>(
          std::max<std::ptrdiff_t>(1, config_.max_in_flight))) {
  if (config_.endpoint.empty()) throw std::invalid_argument("remote generator needs an endpoint");
  spec_.validate();
}

RemoteGenerator::~RemoteGenerator() = default;

bool RemoteGenerator::deterministic() const {
  return spec_.strategy == Strategy::beam || spec_.seed.has_value();
}

std::vector<std::string> RemoteGenerator::generate(const corpus::Document& doc) const {
  const std::string body = make_generation_request(doc.text, spec_);
  const auto expected = static_cast<std::size_t>(spec_.num_sequences);
  auto backoff = config_.initial_backoff;
  std::string last_error;

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Result res;
    {
      in_flight_->acquire();
      httplib::Client client(config_.endpoint);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
          config_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      res = client.Post("/generate", body, "application/json");
      in_flight_->release();
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return parse_generation_response(res->body, expected);
      } catch (const std::exception& e) {
        throw GenerationError(doc.id, e.what());
      }
    }
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
    if (res->status != 429 && res->status < 500) break;
  }
  throw GenerationError(doc.id, last_error);
}

std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec,
                                          const analysis::AnalyzerConfig& analyzer,
                                          const SynonymTable* synonyms,
                                          const RemoteConfig* remote) {
  spec.validate();
  switch (spec.kind) {
    case GeneratorKind::lexrank:
      return std::make_unique<LexRankGenerator>(spec.sentences_per_sequence, analyzer);
    case GeneratorKind::mock_synonym:
      if (!synonyms) throw std::invalid_argument("mock generator needs a synonym table");
      return std::make_unique<MockSynonymGenerator>(*synonyms, spec.num_sequences,
                                                    spec.seed.value_or(0));
    case GeneratorKind::remote_abstractive:
      if (!remote) throw std::invalid_argument("remote generator needs an endpoint");
      return std::make_unique<RemoteGenerator>(*remote, spec);
  }
  throw std::invalid_argument("unknown generator kind");
}

}  // namespace udeg::expansion
