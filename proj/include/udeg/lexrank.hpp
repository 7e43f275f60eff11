// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "udeg/analysis.hpp"

namespace udeg::expansion {

struct LexRankParams {
  double similarity_threshold = 0.1;
  double damping = 0.85;
  double tolerance = 1e-8;  // L1 change between iterations
  int max_iterations = 100;
};

struct PageRankResult {
  std::vector<double> scores;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration over a weighted directed graph given as a dense square
/// matrix (`weights[i][j]` is the edge i -> j). Rows without outgoing weight
/// spread their mass uniformly; teleport is uniform.
PageRankResult pagerank(const std::vector<std::vector<double>>& weights,
                        double damping, double tolerance, int max_iterations);

struct RankedSentence {
  std::string text;
  std::size_t position = 0;  // index in document order
  double score = 0.0;
};

/// Scores every sentence of `text` with LexRank over a TF-IDF cosine graph
/// built from the document's own sentences. Sorted by score descending, ties
/// by earlier position.
std::vector<RankedSentence> lexrank_rank(std::string_view text,
                                         const analysis::AnalyzerConfig& analyzer,
                                         const LexRankParams& params = {});

/// The `count` highest ranked sentences, best first.
std::vector<std::string> lexrank_extract(std::string_view text, std::size_t count,
                                         const analysis::AnalyzerConfig& analyzer,
                                         const LexRankParams& params = {});

}  // namespace udeg::expansion
