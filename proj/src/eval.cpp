// SPDX-License-Identifier: Apache-2.0
#include "udeg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "udeg/analysis.hpp"

namespace udeg::eval {
namespace {

int grade_of(const Judgments& j, const std::string& doc) {
  auto it = j.find(doc);
  return it == j.end() ? 0 : it->second;
}

bool relevant(const Judgments& j, const std::string& doc, const EvalConfig& c) {
  return grade_of(j, doc) >= c.relevance_threshold;
}

double gain(int grade, Gain g) {
  if (grade <= 0) return 0.0;
  return g == Gain::exponential ? std::exp2(static_cast<double>(grade)) - 1.0
                                : static_cast<double>(grade);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void EvalConfig::validate() const {
  if (relevance_threshold < 1) throw std::invalid_argument("relevance threshold must be >= 1");
  for (int k : cutoffs) {
    if (k < 1) throw std::invalid_argument("cutoffs must be positive");
  }
  if (mrr_cutoff && *mrr_cutoff < 1) throw std::invalid_argument("mrr cutoff must be positive");
}

std::size_t count_relevant(const Judgments& judgments, const EvalConfig& config) {
  return static_cast<std::size_t>(
      std::count_if(judgments.begin(), judgments.end(),
                    [&](const auto& kv) { return kv.second >= config.relevance_threshold; }));
}

double reciprocal_rank(std::span<const std::string> ranked, const Judgments& judgments,
                       const EvalConfig& config) {
  std::size_t limit = ranked.size();
  if (config.mrr_cutoff) limit = std::min(limit, static_cast<std::size_t>(*config.mrr_cutoff));
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant(judgments, ranked[i], config)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double precision_at_k(std::span<const std::string> ranked, const Judgments& judgments, int k,
                      const EvalConfig& config) {
  const std::size_t limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i) hits += relevant(judgments, ranked[i], config);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double recall_at_k(std::span<const std::string> ranked, const Judgments& judgments, int k,
                   const EvalConfig& config) {
  const std::size_t total = count_relevant(judgments, config);
  if (total == 0) return 0.0;
  const std::size_t limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i) hits += relevant(judgments, ranked[i], config);
  return static_cast<double>(hits) / static_cast<double>(total);
}

double average_precision(std::span<const std::string> ranked, const Judgments& judgments,
                         const EvalConfig& config) {
  const std::size_t total = count_relevant(judgments, config);
  if (total == 0) return 0.0;
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (relevant(judgments, ranked[i], config)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total);
}

double ndcg_at_k(std::span<const std::string> ranked, const Judgments& judgments, int k,
                 const EvalConfig& config) {
  const std::size_t depth = static_cast<std::size_t>(k);
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(depth, ranked.size()); ++i) {
    dcg += gain(grade_of(judgments, ranked[i]), config.gain) / std::log2(static_cast<double>(i + 2));
  }
  std::vector<int> ideal;
  ideal.reserve(judgments.size());
  for (const auto& [_, g] : judgments) ideal.push_back(g);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(depth, ideal.size()); ++i) {
    idcg += gain(ideal[i], config.gain) / std::log2(static_cast<double>(i + 2));
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::vector<std::string> metric_names(const EvalConfig& config) {
  std::vector<std::string> names;
  names.push_back(config.mrr_cutoff ? "mrr@" + std::to_string(*config.mrr_cutoff) : "mrr");
  names.push_back("map");
  for (int k : config.cutoffs) names.push_back("P@" + std::to_string(k));
  for (int k : config.cutoffs) names.push_back("R@" + std::to_string(k));
  for (int k : config.cutoffs) names.push_back("ndcg@" + std::to_string(k));
  return names;
}

MetricReport evaluate_run(const std::vector<corpus::RunEntry>& run, const corpus::Qrels& qrels,
                          const EvalConfig& config) {
  config.validate();
  MetricReport report;
  report.metric_names = metric_names(config);

  // Ranked doc ids per query, by rank; repeated doc ids keep their first rank.
  std::map<std::string, std::vector<const corpus::RunEntry*>> by_query;
  for (const auto& e : run) by_query[e.query_id].push_back(&e);

  std::map<std::string, double> sums;
  std::map<std::string, std::size_t> counts;
  for (auto& [qid, entries] : by_query) {
    if (!qrels.has_query(qid)) {
      ++report.no_judgment;
      continue;
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto* a, const auto* b) { return a->rank < b->rank; });
    std::vector<std::string> ranked;
    std::unordered_set<std::string> seen;
    for (const auto* e : entries) {
      if (seen.insert(e->doc_id).second) ranked.push_back(e->doc_id);
    }

    const auto& judgments = qrels.for_query(qid);
    QueryMetrics qm;
    qm.query_id = qid;
    qm.has_relevant = count_relevant(judgments, config) > 0;
    if (!qm.has_relevant) ++report.zero_relevant;

    qm.values[report.metric_names[0]] = reciprocal_rank(ranked, judgments, config);
    if (qm.has_relevant) qm.values["map"] = average_precision(ranked, judgments, config);
    for (int k : config.cutoffs) {
      const auto ks = std::to_string(k);
      qm.values["P@" + ks] = precision_at_k(ranked, judgments, k, config);
      if (qm.has_relevant) qm.values["R@" + ks] = recall_at_k(ranked, judgments, k, config);
      qm.values["ndcg@" + ks] = ndcg_at_k(ranked, judgments, k, config);
    }
    for (const auto& [name, v] : qm.values) {
      sums[name] += v;
      ++counts[name];
    }
    ++report.queries_evaluated;
    report.per_query.push_back(std::move(qm));
  }

  for (const auto& name : report.metric_names) {
    auto c = counts.find(name);
    report.aggregate[name] =
        (c == counts.end() || c->second == 0) ? 0.0 : sums[name] / static_cast<double>(c->second);
  }
  return report;
}

std::string MetricReport::to_tsv(bool include_per_query) const {
  std::string out;
  if (include_per_query) {
    for (const auto& q : per_query) {
      for (const auto& name : metric_names) {
        auto it = q.values.find(name);
        if (it == q.values.end()) continue;
        out += name + '\t' + q.query_id + '\t' + fmt(it->second) + '\n';
      }
    }
  }
  out += "num_q\tall\t" + std::to_string(queries_evaluated) + '\n';
  for (const auto& name : metric_names) {
    out += name + "\tall\t" + fmt(aggregate.at(name)) + '\n';
  }
  return out;
}

std::string MetricReport::to_json(bool include_per_query) const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json agg;
  for (const auto& name : metric_names) agg[name] = aggregate.at(name);
  j["aggregate"] = agg;
  j["queries_evaluated"] = queries_evaluated;
  j["no_judgment"] = no_judgment;
  j["zero_relevant"] = zero_relevant;
  if (include_per_query) {
    nlohmann::ordered_json pq = nlohmann::ordered_json::object();
    for (const auto& q : per_query) {
      nlohmann::ordered_json m;
      for (const auto& name : metric_names) {
        if (auto it = q.values.find(name); it != q.values.end()) m[name] = it->second;
      }
      pq[q.query_id] = m;
    }
    j["per_query"] = pq;
  }
  return j.dump(2);
}

std::optional<double> document_diversity(const std::vector<std::string>& generated) {
  std::size_t total = 0;
  std::unordered_set<std::string> unique;
  for (const auto& s : generated) {
    for (auto& tok : analysis::tokenize(s, analysis::AnalyzerConfig::surface())) {
      ++total;
      unique.insert(std::move(tok));
    }
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double lexical_diversity(const std::vector<corpus::ExpandedDocument>& docs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& d : docs) {
    if (auto v = document_diversity(d.generated)) {
      sum += *v;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace udeg::eval
