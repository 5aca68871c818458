// Copyright 2026 The lenlift Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Word counting with Treebank-style tokenization.
//
// A response's length is the number of tokens produced by an NLTK-compatible
// word tokenizer, minus tokens that occur as a contiguous substring of the
// 32-character ASCII punctuation string. Tokenization runs in three stages:
//
//   1. Typographic mapping: curly quotes become straight quotes and the
//      em-dash becomes "--". Other non-ASCII characters pass through and act
//      as word characters.
//   2. Sentence splitting: every line is a sentence; within a line a period
//      (plus any closing quotes/brackets) followed by whitespace and an
//      uppercase letter ends a sentence, unless the word before the period is
//      a single letter, contains a period, or is a listed abbreviation.
//   3. The NLTK word rules (starting quotes, punctuation, brackets, dashes,
//      ending quotes, contractions) applied per sentence, then a whitespace
//      split.
//
// Stage 3 reproduces each rewrite rule of nltk's NLTKWordTokenizer with
// Python `re.sub` semantics (leftmost, non-overlapping, lookarounds read the
// unmodified input of that rule).

#ifndef LENLIFT_WORDCOUNT_HPP_
#define LENLIFT_WORDCOUNT_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lenlift/detail/utf8.hpp"

namespace lenlift {

using TokenList = std::vector<std::string>;

/// The exact set `string.punctuation` from Python.
inline constexpr std::string_view kAsciiPunctuation =
    R"(!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~)";

namespace detail {

using Text = std::u32string;

inline bool is_ascii_alpha(char32_t c) { return (c | 0x20) >= U'a' && (c | 0x20) <= U'z'; }
inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
inline bool is_ascii_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
inline char32_t ascii_lower(char32_t c) { return is_ascii_upper(c) ? c + 32 : c; }

// Python's str.isspace(), which drives both `\s` and str.split().
inline bool is_space(char32_t c) {
  if (c == U' ' || (c >= 0x09 && c <= 0x0D) || (c >= 0x1C && c <= 0x1F)) return true;
  if (c < 0x80) return false;
  return c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

// Approximates Python's `\w`. ASCII is exact; non-ASCII counts as a word
// character except whitespace and the common punctuation/symbol blocks.
inline bool is_word(char32_t c) {
  if (c < 0x80) return is_ascii_alpha(c) || is_ascii_digit(c) || c == U'_';
  if (is_space(c)) return false;
  if (c >= 0xA1 && c <= 0xBF) {
    return c == 0xAA || c == 0xB2 || c == 0xB3 || c == 0xB5 || c == 0xB9 || c == 0xBA ||
           (c >= 0xBC && c <= 0xBE);
  }
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, currency, arrows, math, shapes
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;  // emoji and pictographs
  return true;
}

inline bool contains(std::u32string_view set, char32_t c) {
  return set.find(c) != std::u32string_view::npos;
}

inline char32_t at(const Text& s, std::size_t i) { return i < s.size() ? s[i] : U'\0'; }

// Case-insensitive ASCII prefix test of `word` at s[i].
inline bool matches_ci(const Text& s, std::size_t i, std::u32string_view word) {
  if (i + word.size() > s.size()) return false;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (ascii_lower(s[i + k]) != word[k]) return false;
  }
  return true;
}

inline bool matches(const Text& s, std::size_t i, std::u32string_view word) {
  return i + word.size() <= s.size() && std::u32string_view(s).substr(i, word.size()) == word;
}

// Word boundary after a word character ending at position `end`.
inline bool boundary_after_word(const Text& s, std::size_t end) {
  return end >= s.size() || !is_word(s[end]);
}

// One re.sub pass. `rule(s, i, out)` either appends a replacement and
// returns the match length, or returns 0 and leaves `out` untouched.
template <typename Rule>
Text substitute(const Text& s, Rule&& rule) {
  Text out;
  out.reserve(s.size() + s.size() / 4 + 8);
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t n = rule(s, i, out);
    if (n == 0) {
      out.push_back(s[i]);
      ++i;
    } else {
      i += n;
    }
  }
  return out;
}

// Pads every character in `set` with spaces.
inline Text space_out(const Text& s, std::u32string_view set) {
  return substitute(s, [set](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (!contains(set, t[i])) return 0;
    out += U' ';
    out += t[i];
    out += U' ';
    return 1;
  });
}

// ([^\.])(\.)([closers]*)\s*$ with the two replacement layouts NLTK uses.
inline Text split_final_period(const Text& s, std::u32string_view closers, bool detach_closers) {
  return substitute(s, [&](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] == U'.' || at(t, i + 1) != U'.') return 0;
    std::size_t j = i + 2;
    while (j < t.size() && contains(closers, t[j])) ++j;
    std::size_t k = j;
    while (k < t.size() && is_space(t[k])) ++k;
    if (k != t.size()) return 0;
    out += t[i];
    out += detach_closers ? U" . " : U" .";
    out.append(t, i + 2, j - (i + 2));
    out += U' ';
    return k - i;
  });
}

inline Text apply_starting_quotes(Text s) {
  // ([«“‘„]|[`]+) -> " \1 "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (contains(U"«“‘„", t[i])) {
      out += U' ';
      out += t[i];
      out += U' ';
      return 1;
    }
    if (t[i] != U'`') return 0;
    std::size_t j = i;
    while (j < t.size() && t[j] == U'`') ++j;
    out += U' ';
    out.append(t, i, j - i);
    out += U' ';
    return j - i;
  });
  // ^" -> ``
  if (!s.empty() && s[0] == U'"') s.replace(0, 1, U"``");
  // (``) -> " \1 "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (!matches(t, i, U"``")) return 0;
    out += U" `` ";
    return 2;
  });
  // ([ \(\[{<])(\"|\'{2}) -> "\1 `` "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (!contains(U" ([{<", t[i])) return 0;
    std::size_t n = 0;
    if (at(t, i + 1) == U'"') {
      n = 2;
    } else if (matches(t, i + 1, U"''")) {
      n = 3;
    } else {
      return 0;
    }
    out += t[i];
    out += U" `` ";
    return n;
  });
  // (?i)(?<!\w)(\')(?!(?:re|ve|ll|m|t|s|d|n)\b)(?=\w) -> "\1 "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] != U'\'') return 0;
    if (i > 0 && is_word(t[i - 1])) return 0;
    if (i + 1 >= t.size() || !is_word(t[i + 1])) return 0;
    static constexpr std::array<std::u32string_view, 8> kClitics = {U"re", U"ve", U"ll", U"m",
                                                                     U"t",  U"s",  U"d",  U"n"};
    for (auto clitic : kClitics) {
      if (matches_ci(t, i + 1, clitic) && boundary_after_word(t, i + 1 + clitic.size())) return 0;
    }
    out += U"' ";
    return 1;
  });
  return s;
}

inline Text apply_punctuation(Text s) {
  s = split_final_period(s, U"])}>\"'»”’ ", /*detach_closers=*/true);
  // ([:,])([^\d]) -> " \1 \2"
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if ((t[i] != U':' && t[i] != U',') || i + 1 >= t.size() || is_ascii_digit(t[i + 1])) return 0;
    out += U' ';
    out += t[i];
    out += U' ';
    out += t[i + 1];
    return 2;
  });
  // ([:,])$ -> " \1 "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] != U':' && t[i] != U',') return 0;
    const bool at_end = i + 1 == t.size() || (i + 2 == t.size() && t[i + 1] == U'\n');
    if (!at_end) return 0;
    out += U' ';
    out += t[i];
    out += U' ';
    return 1;
  });
  // \.{2,} -> " \g<0> "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] != U'.' || at(t, i + 1) != U'.') return 0;
    std::size_t j = i;
    while (j < t.size() && t[j] == U'.') ++j;
    out += U' ';
    out.append(t, i, j - i);
    out += U' ';
    return j - i;
  });
  s = space_out(s, U";@#$%&");
  s = space_out(s, U"‒–—―");
  s = split_final_period(s, U"])}>\"'", /*detach_closers=*/false);
  s = space_out(s, U"?!");
  // ([^'])' -> "\1 ' "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] == U'\'' || at(t, i + 1) != U'\'' || at(t, i + 2) != U' ') return 0;
    out += t[i];
    out += U" ' ";
    return 3;
  });
  s = space_out(s, U"*");
  return s;
}

inline Text apply_brackets_and_dashes(Text s) {
  s = space_out(s, U"][(){}<>");
  return substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (!matches(t, i, U"--")) return 0;
    out += U" -- ";
    return 2;
  });
}

inline Text apply_ending_quotes(Text s) {
  s = space_out(s, U"»”’");
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (!matches(t, i, U"''")) return 0;
    out += U" '' ";
    return 2;
  });
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] != U'"') return 0;
    out += U" '' ";
    return 1;
  });
  // \s+ -> " "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (!is_space(t[i])) return 0;
    std::size_t j = i;
    while (j < t.size() && is_space(t[j])) ++j;
    out += U' ';
    return j - i;
  });
  // ([^' ])('[sS]|'[mM]|'[dD]|') -> "\1 \2 "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] == U'\'' || t[i] == U' ' || at(t, i + 1) != U'\'') return 0;
    std::size_t clitic = 0;
    if (contains(U"sSmMdD", at(t, i + 2)) && at(t, i + 3) == U' ') {
      clitic = 2;
    } else if (at(t, i + 2) == U' ') {
      clitic = 1;
    } else {
      return 0;
    }
    out += t[i];
    out += U' ';
    out.append(t, i + 1, clitic);
    out += U' ';
    return clitic + 2;
  });
  // ([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) -> "\1 \2 "
  s = substitute(s, [](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (t[i] == U'\'' || t[i] == U' ') return 0;
    static constexpr std::array<std::u32string_view, 8> kClitics = {
        U"'ll", U"'LL", U"'re", U"'RE", U"'ve", U"'VE", U"n't", U"N'T"};
    for (auto clitic : kClitics) {
      if (matches(t, i + 1, clitic) && at(t, i + 4) == U' ') {
        out += t[i];
        out += U' ';
        out += clitic;
        out += U' ';
        return 5;
      }
    }
    return 0;
  });
  return s;
}

// \b(head)(tail)\b, case-insensitive, rewritten as " head tail ".
inline Text split_contraction(const Text& s, std::u32string_view head, std::u32string_view tail,
                              bool needs_trailing_space) {
  return substitute(s, [&](const Text& t, std::size_t i, Text& out) -> std::size_t {
    if (i > 0 && is_word(t[i - 1])) return 0;
    if (!matches_ci(t, i, head) || !matches_ci(t, i + head.size(), tail)) return 0;
    const std::size_t end = i + head.size() + tail.size();
    if (needs_trailing_space ? !(end < t.size() && is_space(t[end]))
                             : !boundary_after_word(t, end)) {
      return 0;
    }
    out += U' ';
    out.append(t, i, head.size());
    out += U' ';
    out.append(t, i + head.size(), tail.size());
    out += U' ';
    return end - i;
  });
}

inline Text apply_contractions(Text s) {
  s = split_contraction(s, U"can", U"not", false);
  s = split_contraction(s, U"d", U"'ye", false);
  s = split_contraction(s, U"gim", U"me", false);
  s = split_contraction(s, U"gon", U"na", false);
  s = split_contraction(s, U"got", U"ta", false);
  s = split_contraction(s, U"lem", U"me", false);
  s = split_contraction(s, U"more", U"'n", false);
  s = split_contraction(s, U"wan", U"na", true);
  // " 'tis" / " 'twas": the leading space is part of the match.
  for (std::u32string_view tail : {std::u32string_view(U"is"), std::u32string_view(U"was")}) {
    s = substitute(s, [tail](const Text& t, std::size_t i, Text& out) -> std::size_t {
      if (t[i] != U' ' || !matches_ci(t, i + 1, U"'t") || !matches_ci(t, i + 3, tail)) return 0;
      const std::size_t end = i + 3 + tail.size();
      if (!boundary_after_word(t, end)) return 0;
      out += U' ';
      out.append(t, i + 1, 2);
      out += U' ';
      out.append(t, i + 3, tail.size());
      out += U' ';
      return end - i;
    });
  }
  return s;
}

inline void split_whitespace(const Text& s, TokenList& tokens) {
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) tokens.push_back(encode_utf8(std::u32string_view(s).substr(i, j - i)));
    i = j;
  }
}

inline void tokenize_sentence(Text s, TokenList& tokens) {
  s = apply_starting_quotes(std::move(s));
  s = apply_punctuation(std::move(s));
  s = apply_brackets_and_dashes(std::move(s));
  s = U" " + s + U" ";
  s = apply_ending_quotes(std::move(s));
  s = apply_contractions(std::move(s));
  split_whitespace(s, tokens);
}

inline Text map_typography(std::u32string_view in) {
  Text out;
  out.reserve(in.size());
  for (char32_t c : in) {
    switch (c) {
      case 0x2018:
      case 0x2019:
        out += U'\'';
        break;
      case 0x201C:
      case 0x201D:
        out += U'"';
        break;
      case 0x2014:
        out += U"--";
        break;
      default:
        out += c;
    }
  }
  return out;
}

inline bool is_abbreviation(std::u32string_view word) {
  while (!word.empty() && contains(U"([{\"'`", word.front())) word.remove_prefix(1);
  if (word.size() == 1 && (is_ascii_alpha(word[0]) || (word[0] >= 0x80 && is_word(word[0])))) {
    return true;
  }
  if (word.find(U'.') != std::u32string_view::npos) return true;
  static constexpr std::array<std::u32string_view, 35> kAbbreviations = {
      U"mr",  U"mrs",  U"ms",   U"dr",  U"prof",   U"st",  U"sr",  U"jr",  U"vs",
      U"etc", U"no",   U"fig",  U"inc", U"ltd",    U"co",  U"corp", U"dept", U"approx",
      U"gen", U"gov",  U"sen",  U"rep", U"mt",     U"jan", U"feb", U"mar", U"apr",
      U"jun", U"jul",  U"aug",  U"sep", U"sept",   U"oct", U"nov", U"dec"};
  Text lower(word);
  for (auto& c : lower) c = ascii_lower(c);
  for (auto abbreviation : kAbbreviations) {
    if (lower == abbreviation) return true;
  }
  return false;
}

inline std::u32string_view trim_space(std::u32string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::u32string_view last_word(std::u32string_view s) {
  s = trim_space(s);
  std::size_t start = s.size();
  while (start > 0 && !is_space(s[start - 1])) --start;
  return s.substr(start);
}

// Sentence boundary: \.[)\]}"']*\s+ followed by [("'`]?[A-Z].
inline std::vector<Text> split_sentences(const Text& text) {
  std::vector<Text> sentences;
  auto emit = [&](std::u32string_view piece) {
    piece = trim_space(piece);
    if (!piece.empty()) sentences.emplace_back(piece);
  };
  std::u32string_view rest(text);
  while (true) {
    const std::size_t newline = rest.find(U'\n');
    const std::u32string_view line = rest.substr(0, newline);
    std::size_t start = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] != U'.') {
        ++pos;
        continue;
      }
      std::size_t j = pos + 1;
      while (j < line.size() && contains(U")]}\"'", line[j])) ++j;
      std::size_t k = j;
      while (k < line.size() && is_space(line[k])) ++k;
      std::size_t next = k;
      if (next < line.size() && contains(U"(\"'`", line[next])) ++next;
      if (k == j || next >= line.size() || !is_ascii_upper(line[next])) {
        ++pos;
        continue;
      }
      if (!is_abbreviation(last_word(line.substr(start, pos - start)))) {
        emit(line.substr(start, j - start));
        start = k;
      }
      pos = k;
    }
    emit(line.substr(start));
    if (newline == std::u32string_view::npos) break;
    rest.remove_prefix(newline + 1);
  }
  return sentences;
}

}  // namespace detail

/// Splits `text` into Treebank-style tokens. Total, pure and deterministic.
inline TokenList tokenize(std::string_view text) {
  TokenList tokens;
  const detail::Text mapped = detail::map_typography(detail::decode_utf8(text));
  for (auto& sentence : detail::split_sentences(mapped)) {
    detail::tokenize_sentence(std::move(sentence), tokens);
  }
  return tokens;
}

/// True iff `token` occurs contiguously inside kAsciiPunctuation. Note that
/// "..." and "``" are not substrings (they count as words) while "()" is.
inline bool is_excluded(std::string_view token) {
  return kAsciiPunctuation.find(token) != std::string_view::npos;
}

inline std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  for (const auto& token : tokenize(text)) {
    if (!is_excluded(token)) ++n;
  }
  return n;
}

}  // namespace lenlift

#endif  // LENLIFT_WORDCOUNT_HPP_
