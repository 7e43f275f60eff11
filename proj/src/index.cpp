// SPDX-License-Identifier: Apache-2.0
#include "udeg/index.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace udeg::index {
namespace {

using TermTf = std::pair<std::string, std::uint32_t>;

// Sorted (term, tf) pairs for one document.
std::vector<TermTf> count_terms(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  std::vector<TermTf> out;
  for (auto& t : tokens) {
    if (!out.empty() && out.back().first == t) {
      ++out.back().second;
    } else {
      out.emplace_back(std::move(t), 1);
    }
  }
  return out;
}

constexpr std::array<char, 8> kMagic = {'U', 'D', 'E', 'G', 'I', 'D', 'X', '1'};

// Little-endian fixed-width encoding, independent of host byte order.
template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
  }
  out.write(buf.data(), buf.size());
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw std::runtime_error("index snapshot truncated");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw std::runtime_error("index snapshot truncated");
  return s;
}

}  // namespace

InvertedIndex InvertedIndex::build(const corpus::Collection& docs,
                                   const analysis::AnalyzerConfig& config,
                                   unsigned parallelism) {
  if (docs.empty()) throw std::invalid_argument("cannot index an empty collection");

  // Phase 1: analyze documents in contiguous shards.
  std::vector<std::vector<TermTf>> per_doc(docs.size());
  const std::size_t workers =
      std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(1, docs.size()));
  const std::size_t chunk = (docs.size() + workers - 1) / workers;
  auto analyze = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      per_doc[i] = count_terms(analysis::tokenize(docs[i].text, config));
    }
  };
  if (workers == 1) {
    analyze(0, docs.size());
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(docs.size(), b + chunk);
      if (b < e) pool.emplace_back(analyze, b, e);
    }
  }

  // Phase 2: deterministic merge in collection order.
  InvertedIndex idx;
  idx.config_ = config;
  std::vector<std::string_view> vocab;
  for (const auto& d : per_doc) {
    for (const auto& [t, _] : d) vocab.push_back(t);
  }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  idx.terms_.assign(vocab.begin(), vocab.end());
  idx.postings_.resize(idx.terms_.size());
  idx.collection_counts_.assign(idx.terms_.size(), 0);

  std::unordered_map<std::string_view, TermId> ids;
  ids.reserve(idx.terms_.size());
  for (TermId t = 0; t < idx.terms_.size(); ++t) ids.emplace(idx.terms_[t], t);

  idx.doc_ids_.reserve(docs.size());
  idx.doc_lengths_.reserve(docs.size());
  for (DocOrdinal d = 0; d < docs.size(); ++d) {
    std::uint64_t length = 0;
    for (const auto& [t, tf] : per_doc[d]) {
      const TermId id = ids.at(t);
      idx.postings_[id].push_back({d, tf});
      idx.collection_counts_[id] += tf;
      length += tf;
    }
    idx.doc_ids_.push_back(docs[d].id);
    idx.doc_lengths_.push_back(static_cast<std::uint32_t>(length));
    idx.total_tokens_ += length;
  }
  idx.finalize();
  if (idx.doc_lookup_.size() != idx.doc_ids_.size()) {
    throw std::invalid_argument("duplicate document ids in collection");
  }
  return idx;
}

void InvertedIndex::finalize() {
  term_lookup_.clear();
  term_lookup_.reserve(terms_.size());
  for (TermId t = 0; t < terms_.size(); ++t) term_lookup_.emplace(terms_[t], t);
  doc_lookup_.clear();
  doc_lookup_.reserve(doc_ids_.size());
  for (DocOrdinal d = 0; d < doc_ids_.size(); ++d) doc_lookup_.emplace(doc_ids_[d], d);

  doc_terms_.assign(doc_ids_.size(), {});
  for (TermId t = 0; t < postings_.size(); ++t) {
    for (const auto& p : postings_[t]) doc_terms_[p.doc].push_back({t, p.tf});
  }
}

double InvertedIndex::avgdl() const noexcept {
  return doc_ids_.empty() ? 0.0
                          : static_cast<double>(total_tokens_) /
                                static_cast<double>(doc_ids_.size());
}

std::optional<TermId> InvertedIndex::term_id(std::string_view term) const {
  auto it = term_lookup_.find(term);
  if (it == term_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<DocOrdinal> InvertedIndex::ordinal(std::string_view doc_id) const {
  auto it = doc_lookup_.find(doc_id);
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

DocOrdinal InvertedIndex::require_ordinal(std::string_view doc_id) const {
  auto d = ordinal(doc_id);
  if (!d) throw std::out_of_range("unknown document id '" + std::string(doc_id) + "'");
  return *d;
}

std::uint32_t InvertedIndex::doc_frequency(std::string_view term) const {
  auto t = term_id(term);
  return t ? static_cast<std::uint32_t>(postings_[*t].size()) : 0;
}

std::uint32_t InvertedIndex::term_frequency(TermId term, DocOrdinal doc) const {
  const auto& list = postings_.at(term);
  auto it = std::lower_bound(list.begin(), list.end(), doc,
                             [](const Posting& p, DocOrdinal d) { return p.doc < d; });
  return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

std::uint32_t InvertedIndex::term_frequency(std::string_view term,
                                            std::string_view doc_id) const {
  const DocOrdinal doc = require_ordinal(doc_id);
  auto t = term_id(term);
  return t ? term_frequency(*t, doc) : 0;
}

double InvertedIndex::collection_prob(TermId term) const {
  if (total_tokens_ == 0) return 0.0;
  return static_cast<double>(collection_counts_.at(term)) /
         static_cast<double>(total_tokens_);
}

double InvertedIndex::collection_prob(std::string_view term) const {
  auto t = term_id(term);
  return t ? collection_prob(*t) : 0.0;
}

void InvertedIndex::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint8_t>(out, config_.lowercase);
  put<std::uint8_t>(out, config_.stemming);
  put<std::uint8_t>(out, config_.stopwords);
  put<std::uint8_t>(out, 0);
  put<std::uint32_t>(out, analysis::kStopwordListVersion);
  put<std::uint64_t>(out, doc_ids_.size());
  put<std::uint64_t>(out, total_tokens_);
  put<std::uint64_t>(out, terms_.size());
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    put_string(out, doc_ids_[d]);
    put<std::uint32_t>(out, doc_lengths_[d]);
  }
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    put_string(out, terms_[t]);
    put<std::uint64_t>(out, collection_counts_[t]);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(postings_[t].size()));
    for (const auto& p : postings_[t]) {
      put<std::uint32_t>(out, p.doc);
      put<std::uint32_t>(out, p.tf);
    }
  }
  if (!out) throw std::runtime_error("failed writing index snapshot");
}

InvertedIndex InvertedIndex::read(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("not a udeg index snapshot");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("unsupported index snapshot version " + std::to_string(version));
  }
  InvertedIndex idx;
  idx.config_.lowercase = get<std::uint8_t>(in) != 0;
  idx.config_.stemming = get<std::uint8_t>(in) != 0;
  idx.config_.stopwords = get<std::uint8_t>(in) != 0;
  (void)get<std::uint8_t>(in);
  const auto stop_version = get<std::uint32_t>(in);
  if (stop_version != static_cast<std::uint32_t>(analysis::kStopwordListVersion)) {
    throw std::runtime_error("index was built with stopword list version " +
                             std::to_string(stop_version));
  }
  const auto n_docs = get<std::uint64_t>(in);
  idx.total_tokens_ = get<std::uint64_t>(in);
  const auto n_terms = get<std::uint64_t>(in);
  idx.doc_ids_.reserve(n_docs);
  idx.doc_lengths_.reserve(n_docs);
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    idx.doc_ids_.push_back(get_string(in));
    idx.doc_lengths_.push_back(get<std::uint32_t>(in));
  }
  idx.terms_.reserve(n_terms);
  idx.postings_.resize(n_terms);
  idx.collection_counts_.reserve(n_terms);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    idx.terms_.push_back(get_string(in));
    idx.collection_counts_.push_back(get<std::uint64_t>(in));
    const auto df = get<std::uint32_t>(in);
    auto& list = idx.postings_[t];
    list.reserve(df);
    for (std::uint32_t i = 0; i < df; ++i) {
      const auto doc = get<std::uint32_t>(in);
      const auto tf = get<std::uint32_t>(in);
      if (doc >= n_docs) throw std::runtime_error("index snapshot corrupt: doc ordinal");
      list.push_back({doc, tf});
    }
  }
  idx.finalize();
  return idx;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read(in);
}

}  // namespace udeg::index
