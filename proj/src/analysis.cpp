// SPDX-License-Identifier: Apache-2.0
#include "udeg/analysis.hpp"

#include <algorithm>
#include <array>
#include <cwctype>
#include <locale.h>

namespace udeg::analysis {
namespace {

constexpr std::array<std::string_view, 33> kStopwords = {
    "a",    "an",    "and",  "are",   "as",    "at",   "be",   "but",  "by",
    "for",  "if",    "in",   "into",  "is",    "it",   "no",   "not",  "of",
    "on",   "or",    "such", "that",  "the",   "their", "then", "there",
    "these", "they", "this", "to",    "was",   "will", "with"};

// glibc ships C.UTF-8 with full Unicode ctype tables. Without it only ASCII
// is classified as alphanumeric.
locale_t utf8_locale() {
  static const locale_t loc = newlocale(LC_CTYPE_MASK, "C.UTF-8", locale_t{});
  return loc;
}

bool is_alnum(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  locale_t loc = utf8_locale();
  return loc != locale_t{} && iswalnum_l(static_cast<wint_t>(cp), loc);
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  }
  locale_t loc = utf8_locale();
  if (loc == locale_t{}) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point starting at text[pos]; advances pos. Malformed
// sequences consume one byte and yield U+FFFD (never alphanumeric).
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + extra >= text.size()) {
    ++pos;
    return kInvalid;
  }
  for (int i = 1; i <= extra; ++i) {
    const auto cont = static_cast<unsigned char>(text[pos + i]);
    if ((cont & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_lower_ascii_word(std::string_view token) {
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

std::span<const std::string_view> stopword_list() { return kStopwords; }

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) !=
         kStopwords.end();
}

std::vector<std::string> tokenize(std::string_view text,
                                  const AnalyzerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (config.stopwords && is_stopword(current)) {
      current.clear();
      return;
    }
    if (config.stemming && is_lower_ascii_word(current)) {
      tokens.push_back(porter_stem(current));
    } else {
      tokens.push_back(std::move(current));
    }
    current.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = decode_utf8(text, pos);
    if (is_alnum(cp)) {
      append_utf8(current, config.lowercase ? to_lower(cp) : cp);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  auto emit = [&](std::string_view piece) {
    std::size_t b = 0;
    std::size_t e = piece.size();
    while (b < e && is_space(piece[b])) ++b;
    while (e > b && is_space(piece[e - 1])) --e;
    if (e > b) sentences.emplace_back(piece.substr(b, e - b));
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 == text.size() || is_space(text[i + 1])) {
      emit(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) emit(text.substr(start));
  return sentences;
}

}  // namespace udeg::analysis
