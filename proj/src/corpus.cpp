// SPDX-License-Identifier: Apache-2.0
#include "udeg/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace udeg::corpus {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Reads `id<TAB>text` lines; the text is everything after the first TAB.
template <typename Record>
std::vector<Record> load_id_text_tsv(const std::filesystem::path& path,
                                     const char* kind) {
  auto in = open_input(path);
  std::vector<Record> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string(), line_no, "expected id<TAB>text");
    }
    Record rec{line.substr(0, tab), line.substr(tab + 1)};
    if (rec.id.empty()) {
      throw ParseError(path.string(), line_no, std::string("empty ") + kind + " id");
    }
    if (!seen.insert(rec.id).second) {
      throw ParseError(path.string(), line_no,
                       std::string("duplicate ") + kind + " id '" + rec.id + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

template <typename Record>
void write_id_text_tsv(const std::vector<Record>& records,
                       const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& r : records) {
    if (r.id.find_first_of("\t\n") != std::string::npos ||
        r.text.find('\n') != std::string::npos) {
      throw std::invalid_argument("record '" + r.id +
                                  "' cannot be represented as a TSV line");
    }
    out << r.id << '\t' << r.text << '\n';
  }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_int(std::string_view s, int& value) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

bool parse_double(std::string_view s, double& value) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& what)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : "") +
                         ": " + what),
      line_(line) {}

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
  judgments_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return 0;
  auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

bool Qrels::has_query(const std::string& query_id) const {
  return judgments_.count(query_id) > 0;
}

const std::map<std::string, int>& Qrels::for_query(const std::string& query_id) const {
  static const std::map<std::string, int> kEmpty;
  auto q = judgments_.find(query_id);
  return q == judgments_.end() ? kEmpty : q->second;
}

std::size_t Qrels::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, docs] : judgments_) n += docs.size();
  return n;
}

std::string ExpandedDocument::expanded_text() const {
  if (generated.empty()) return contents;
  std::string out;
  for (const auto& s : generated) {
    out += s;
    out += ' ';
  }
  out += contents;
  return out;
}

Collection load_collection_tsv(const std::filesystem::path& path) {
  return load_id_text_tsv<Document>(path, "document");
}

void write_collection_tsv(const Collection& docs, const std::filesystem::path& path) {
  write_id_text_tsv(docs, path);
}

QuerySet load_queries_tsv(const std::filesystem::path& path) {
  return load_id_text_tsv<Query>(path, "query");
}

void write_queries_tsv(const QuerySet& queries, const std::filesystem::path& path) {
  write_id_text_tsv(queries, path);
}

Qrels load_qrels(const std::filesystem::path& path) {
  auto in = open_input(path);
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 4) {
      throw ParseError(path.string(), line_no, "expected 'qid 0 docid grade'");
    }
    int grade = 0;
    if (!parse_int(fields[3], grade)) {
      throw ParseError(path.string(), line_no,
                       "non-integer grade '" + std::string(fields[3]) + "'");
    }
    auto& docs = qrels.judgments_[std::string(fields[0])];
    auto [it, inserted] = docs.insert_or_assign(std::string(fields[2]), grade);
    if (!inserted) ++qrels.duplicates_;
  }
  return qrels;
}

void write_qrels(const Qrels& qrels, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& [qid, docs] : qrels.judgments()) {
    for (const auto& [docid, grade] : docs) {
      out << qid << " 0 " << docid << ' ' << grade << '\n';
    }
  }
}

std::string format_run_line(const RunEntry& e) {
  char score[64];
  std::snprintf(score, sizeof score, "%.6f", e.score);
  std::string line;
  line.reserve(e.query_id.size() + e.doc_id.size() + e.tag.size() + 32);
  line += e.query_id;
  line += " Q0 ";
  line += e.doc_id;
  line += ' ';
  line += std::to_string(e.rank);
  line += ' ';
  line += score;
  line += ' ';
  line += e.tag;
  return line;
}

void validate_run(const std::vector<RunEntry>& entries) {
  struct Last {
    int rank;
    double score;
  };
  std::unordered_map<std::string, Last> last;
  for (const auto& e : entries) {
    auto it = last.find(e.query_id);
    const int expected = it == last.end() ? 1 : it->second.rank + 1;
    if (e.rank != expected) {
      throw std::invalid_argument("query " + e.query_id + ": expected rank " +
                                  std::to_string(expected) + ", got " +
                                  std::to_string(e.rank));
    }
    if (it != last.end() && e.score > it->second.score) {
      throw std::invalid_argument("query " + e.query_id + ": score increases at rank " +
                                  std::to_string(e.rank));
    }
    last[e.query_id] = {e.rank, e.score};
  }
}

void write_run(const std::vector<RunEntry>& entries, const std::filesystem::path& path) {
  validate_run(entries);
  auto out = open_output(path);
  for (const auto& e : entries) out << format_run_line(e) << '\n';
}

std::vector<RunEntry> read_run(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<RunEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto f = split_whitespace(line);
    if (f.empty()) continue;
    if (f.size() != 6) {
      throw ParseError(path.string(), line_no, "expected 'qid Q0 docid rank score tag'");
    }
    RunEntry e;
    e.query_id = f[0];
    e.doc_id = f[2];
    if (!parse_int(f[3], e.rank) || e.rank < 1) {
      throw ParseError(path.string(), line_no, "invalid rank '" + std::string(f[3]) + "'");
    }
    if (!parse_double(f[4], e.score)) {
      throw ParseError(path.string(), line_no, "invalid score '" + std::string(f[4]) + "'");
    }
    e.tag = f[5];
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string to_jsonl_line(const ExpandedDocument& doc) {
  // Key order is fixed by construction; ordered_json keeps insertion order.
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["contents"] = doc.contents;
  j["generated"] = doc.generated;
  return j.dump();
}

namespace {

ExpandedDocument parse_jsonl(const std::string& line, const std::string& source,
                             std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
  }
  try {
    ExpandedDocument doc;
    doc.id = j.at("id").get<std::string>();
    doc.contents = j.at("contents").get<std::string>();
    if (auto g = j.find("generated"); g != j.end()) {
      doc.generated = g->get<std::vector<std::string>>();
    }
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(source, line_no, std::string("bad record: ") + e.what());
  }
}

}  // namespace

ExpandedDocument from_jsonl_line(const std::string& line, std::size_t line_no) {
  return parse_jsonl(line, "jsonl", line_no);
}

void write_expanded_jsonl(const std::vector<ExpandedDocument>& docs,
                          const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& d : docs) out << to_jsonl_line(d) << '\n';
}

std::vector<ExpandedDocument> read_expanded_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<ExpandedDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    docs.push_back(parse_jsonl(line, path.string(), line_no));
  }
  return docs;
}

Collection to_collection(const std::vector<ExpandedDocument>& docs) {
  Collection out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back({d.id, d.expanded_text()});
  return out;
}

Collection sample_collection(const Collection& docs, std::size_t count,
                             std::uint64_t seed) {
  // Selection sampling (Knuth, Algorithm S): keeps input order.
  std::mt19937_64 rng(seed);
  Collection out;
  std::size_t needed = std::min(count, docs.size());
  out.reserve(needed);
  for (std::size_t i = 0; i < docs.size() && needed > 0; ++i) {
    const std::size_t remaining = docs.size() - i;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u * static_cast<double>(remaining) < static_cast<double>(needed)) {
      out.push_back(docs[i]);
      --needed;
    }
  }
  return out;
}

}  // namespace udeg::corpus
