// SPDX-License-Identifier: Apache-2.0
#include "udeg/lexrank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace udeg::expansion {

PageRankResult pagerank(const std::vector<std::vector<double>>& weights,
                        double damping, double tolerance, int max_iterations) {
  const std::size_t n = weights.size();
  PageRankResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  for (const auto& row : weights) {
    if (row.size() != n) throw std::invalid_argument("pagerank: matrix is not square");
  }

  std::vector<double> out_weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double w : weights[i]) out_weight[i] += w;
  }

  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> p(n, uniform);
  std::vector<double> next(n);
  for (int it = 1; it <= max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (out_weight[i] == 0.0) dangling += p[i];
    }
    const double base = (1.0 - damping) * uniform + damping * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t i = 0; i < n; ++i) {
      if (out_weight[i] == 0.0) continue;
      const double share = damping * p[i] / out_weight[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (weights[i][j] != 0.0) next[j] += share * weights[i][j];
      }
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - p[i]);
    p.swap(next);
    result.iterations = it;
    if (change < tolerance) {
      result.converged = true;
      break;
    }
  }
  result.scores = std::move(p);
  return result;
}

std::vector<RankedSentence> lexrank_rank(std::string_view text,
                                         const analysis::AnalyzerConfig& analyzer,
                                         const LexRankParams& params) {
  const auto sentences = analysis::split_sentences(text);
  const std::size_t m = sentences.size();
  if (m == 0) return {};

  std::vector<std::map<std::string, double>> tf(m);
  std::map<std::string, double> df;
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& tok : analysis::tokenize(sentences[i], analyzer)) tf[i][std::move(tok)] += 1.0;
    for (const auto& [t, _] : tf[i]) df[t] += 1.0;
  }

  // TF-IDF vectors, idf = ln(1 + M / df).
  const double big_m = static_cast<double>(m);
  std::vector<double> norm(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& [t, w] : tf[i]) {
      w *= std::log(1.0 + big_m / df[t]);
      norm[i] += w * w;
    }
    norm[i] = std::sqrt(norm[i]);
  }

  std::vector<std::vector<double>> graph(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (norm[i] == 0.0 || norm[j] == 0.0) continue;
      double dot = 0.0;
      // Both maps are sorted by term: merge walk.
      auto a = tf[i].begin();
      auto b = tf[j].begin();
      while (a != tf[i].end() && b != tf[j].end()) {
        if (a->first < b->first) {
          ++a;
        } else if (b->first < a->first) {
          ++b;
        } else {
          dot += a->second * b->second;
          ++a;
          ++b;
        }
      }
      const double sim = dot / (norm[i] * norm[j]);
      if (sim >= params.similarity_threshold) {
        graph[i][j] = sim;
        graph[j][i] = sim;
      }
    }
  }

  const auto pr = pagerank(graph, params.damping, params.tolerance, params.max_iterations);
  std::vector<RankedSentence> ranked;
  ranked.reserve(m);
  for (std::size_t i = 0; i < m; ++i) ranked.push_back({sentences[i], i, pr.scores[i]});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSentence& a, const RankedSentence& b) {
                     return a.score > b.score;
                   });
  return ranked;
}

std::vector<std::string> lexrank_extract(std::string_view text, std::size_t count,
                                         const analysis::AnalyzerConfig& analyzer,
                                         const LexRankParams& params) {
  auto ranked = lexrank_rank(text, analyzer, params);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < count; ++i) {
    out.push_back(std::move(ranked[i].text));
  }
  return out;
}

}  // namespace udeg::expansion
