// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace udeg::analysis {

/// Text normalization chain shared by indexing, querying, LexRank and the
/// diversity statistic. Tokens are maximal runs of Unicode alphanumerics;
/// stopwords are dropped before stemming.
struct AnalyzerConfig {
  bool lowercase = true;
  bool stemming = true;
  bool stopwords = true;

  /// Lowercase only. Used for surface-form work (diversity, synonym lookup).
  static AnalyzerConfig surface() { return {true, false, false}; }

  friend bool operator==(const AnalyzerConfig&, const AnalyzerConfig&) = default;
};

/// Version tag of the built-in stopword list. Bumped whenever the list changes.
inline constexpr int kStopwordListVersion = 1;

/// The built-in English stopword list, in the order of assets/stopwords_en.txt.
std::span<const std::string_view> stopword_list();

bool is_stopword(std::string_view token);

/// Porter stemmer (Martin Porter's reference C behaviour). Input is expected
/// to be lowercase ASCII letters; anything else is returned unchanged.
std::string porter_stem(std::string_view word);

std::vector<std::string> tokenize(std::string_view text,
                                  const AnalyzerConfig& config = {});

/// Rule-based splitter: a sentence ends at '.', '!' or '?' followed by
/// whitespace or end of input. Pieces are trimmed and empty ones dropped.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace udeg::analysis
