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

// Length-instructed benchmark construction from prompts and reference
// generations.
//
// The target length of a prompt is the shortest reference answer (in words)
// and that answer is the baseline the model under test is judged against.

#ifndef LENLIFT_BENCHBUILD_HPP_
#define LENLIFT_BENCHBUILD_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "lenlift/error.hpp"
#include "lenlift/lift.hpp"
#include "lenlift/records.hpp"
#include "lenlift/wordcount.hpp"

namespace lenlift {

using PromptMap = std::map<std::string, std::string>;  // id -> prompt text
using IdSet = std::set<std::string>;

/// Ids must be unique; loaders already enforce this for JSONL input.
inline PromptMap to_prompt_map(std::span<const PromptRecord> prompts) {
  PromptMap out;
  for (const auto& p : prompts) {
    if (!out.emplace(p.id, p.prompt).second) throw ValidationError("duplicate prompt id " + p.id);
  }
  return out;
}

/// Reads one id per line; blank lines and lines starting with '#' are skipped.
inline IdSet load_id_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  IdSet ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    ids.insert(line.substr(b, e - b + 1));
  }
  return ids;
}

namespace detail {

struct RankedRef {
  std::size_t words;
  const ReferenceGeneration* ref;
};

/// References grouped by prompt id, each group sorted by (word count, label).
inline std::map<std::string, std::vector<RankedRef>> rank_references(
    const PromptMap& prompts, std::span<const ReferenceGeneration> refs) {
  std::map<std::string, std::vector<RankedRef>> groups;
  std::set<std::string> unknown;
  for (const auto& r : refs) {
    if (!prompts.contains(r.prompt_id)) {
      unknown.insert(r.prompt_id);
      continue;
    }
    groups[r.prompt_id].push_back({count_words(r.response), &r});
  }
  if (!unknown.empty()) {
    std::string msg = "references name unknown prompt ids:";
    for (const auto& id : unknown) msg += " " + id;
    throw ValidationError(msg);
  }
  for (auto& [id, group] : groups) {
    std::sort(group.begin(), group.end(), [](const RankedRef& a, const RankedRef& b) {
      return std::tie(a.words, a.ref->model_label) < std::tie(b.words, b.ref->model_label);
    });
    std::set<std::string_view> labels;
    for (const auto& g : group) {
      if (!labels.insert(g.ref->model_label).second) {
        throw ValidationError("prompt " + id + " has two references from " + g.ref->model_label);
      }
    }
  }
  return groups;
}

inline std::string id_list(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 20;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > kShown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

inline BenchmarkEntry make_entry(std::string id, const std::string& prompt, std::size_t words,
                                 const ReferenceGeneration& baseline) {
  // A reference made only of punctuation counts zero words; limits start at 1.
  const std::size_t target = std::max<std::size_t>(words, 1);
  return BenchmarkEntry{std::move(id), prompt, render_template(prompt, target), target,
                        Baseline{baseline.response, baseline.model_label}};
}

}  // namespace detail

/// One entry per non-excluded prompt, ordered by id. Target length is the
/// minimum reference word count; ties for the baseline go to the smallest
/// model label.
inline std::vector<BenchmarkEntry> build_benchmark(const PromptMap& prompts,
                                                   std::span<const ReferenceGeneration> refs,
                                                   const IdSet& exclusions = {}) {
  const auto groups = detail::rank_references(prompts, refs);
  std::vector<BenchmarkEntry> out;
  std::vector<std::string> missing;
  for (const auto& [id, prompt] : prompts) {
    if (exclusions.contains(id)) continue;
    auto it = groups.find(id);
    if (it == groups.end()) {
      missing.push_back(id);
      continue;
    }
    const auto& best = it->second.front();
    out.push_back(detail::make_entry(id, prompt, best.words, *best.ref));
  }
  if (!missing.empty()) {
    throw ValidationError("prompts without reference generations: " + detail::id_list(missing));
  }
  return out;
}

/// k entries per prompt with ids "<prompt_id>#c1".."#ck", one per reference
/// length among the k shortest references. Each entry's baseline is the
/// shortest reference that fits its limit.
inline std::vector<BenchmarkEntry> build_multi_constraint(const PromptMap& prompts,
                                                          std::span<const ReferenceGeneration> refs,
                                                          std::size_t k,
                                                          const IdSet& exclusions = {}) {
  if (k < 1) throw ConfigError("number of constraints must be at least 1");
  const auto groups = detail::rank_references(prompts, refs);
  std::vector<BenchmarkEntry> out;
  std::vector<std::string> short_of;
  for (const auto& [id, prompt] : prompts) {
    if (exclusions.contains(id)) continue;
    auto it = groups.find(id);
    if (it == groups.end() || it->second.size() < k) {
      short_of.push_back(id);
      continue;
    }
    const auto& group = it->second;
    for (std::size_t j = 0; j < k; ++j) {
      // group is sorted, so group[0] is the shortest reference and it fits
      // every limit group[j].words.
      out.push_back(detail::make_entry(id + "#c" + std::to_string(j + 1), prompt, group[j].words,
                                       *group.front().ref));
    }
  }
  if (!short_of.empty()) {
    throw ValidationError("prompts with fewer than " + std::to_string(k) +
                          " reference generations: " + detail::id_list(short_of));
  }
  return out;
}

/// max(1, round-half-up(factor * target)). The epsilon absorbs products such
/// as 0.1 * 15 that land just below an exact half.
inline std::size_t scaled_target(std::size_t target, double factor) {
  const double scaled = std::floor(factor * static_cast<double>(target) + 0.5 + 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(scaled));
}

inline void validate_factor(double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw ConfigError("scale factor must be in (0, 1], got " + std::to_string(factor));
  }
}

/// Tightens every target by `factor`. A baseline that no longer fits is
/// dropped and the entry becomes baseline-less (violation rate only). The
/// baseline is already the shortest reference, so no other reference could
/// replace it.
inline std::vector<BenchmarkEntry> scale_benchmark(std::span<const BenchmarkEntry> bench,
                                                   double factor) {
  validate_factor(factor);
  std::vector<BenchmarkEntry> out;
  out.reserve(bench.size());
  for (const auto& e : bench) {
    BenchmarkEntry s = e;
    s.target_len = scaled_target(e.target_len, factor);
    s.li_prompt = render_template(e.original_prompt, s.target_len);
    if (s.baseline && count_words(s.baseline->response) > s.target_len) s.baseline.reset();
    out.push_back(std::move(s));
  }
  return out;
}

struct ScaleSpec {
  std::vector<double> factors = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};

  void validate() const {
    if (factors.empty()) throw ConfigError("scale factor list is empty");
    for (std::size_t i = 0; i < factors.size(); ++i) {
      validate_factor(factors[i]);
      if (i > 0 && !(factors[i] < factors[i - 1])) {
        throw ConfigError("scale factors must be strictly decreasing");
      }
    }
  }
};

namespace detail {

inline const std::vector<std::regex>& constraint_patterns() {
  static const std::vector<std::regex> patterns = [] {
    const std::string num =
        R"((\d+|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|fifteen|twenty|)"
        R"(thirty|forty|fifty|sixty|seventy|eighty|ninety|hundred|a single|a few|a couple of))";
    const std::string unit = R"((words?|sentences?|paragraphs?|characters?|chars|lines?|bullet points?))";
    const std::string unit1 = R"((word|sentence|paragraph|character|line))";
    const std::string bound =
        R"((less than|fewer than|no more than|not more than|at most|maximum of|maximum|max|)"
        R"(a maximum of|limit of|limited to|up to|under|not exceeding|no longer than))";
    const auto flags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;
    return std::vector<std::regex>{
        // "in 50 words", "using at most three sentences", "within 2 paragraphs"
        std::regex(R"(\b(in|using|within|with)\s+()" + bound + R"(\s+)?)" + num + R"(\s+)" + unit + R"(\b)",
                   flags),
        // "50 words or less"
        std::regex(R"(\b)" + num + R"(\s+)" + unit + R"(\s+or\s+(less|fewer|under|shorter)\b)", flags),
        // "no more than 100 words", "at most 3 sentences"
        std::regex(R"(\b)" + bound + R"(\s+)" + num + R"(\s+)" + unit + R"(\b)", flags),
        // "a 100-word summary", "one-paragraph answer"
        std::regex(R"(\b)" + num + R"(\s*-\s*)" + unit1 + R"(\b)", flags),
        // "200 words max", "50 words maximum"
        std::regex(R"(\b)" + num + R"(\s+)" + unit + R"(\s+(max|maximum|limit)\b)", flags),
        // "word limit", "character count of"
        std::regex(R"(\b(word|character)\s+(limit|count)\b)", flags),
    };
  }();
  return patterns;
}

}  // namespace detail

/// Heuristic for prompts that already carry a length limit. False positives
/// are possible ("I walked 50 words into the essay" style text); use an
/// explicit id list to override.
inline bool detect_preexisting_constraint(std::string_view prompt) {
  const std::string text(prompt);
  for (const auto& re : detail::constraint_patterns()) {
    if (std::regex_search(text, re)) return true;
  }
  return false;
}

inline IdSet auto_exclusions(const PromptMap& prompts) {
  IdSet out;
  for (const auto& [id, prompt] : prompts) {
    if (detect_preexisting_constraint(prompt)) out.insert(id);
  }
  return out;
}

}  // namespace lenlift

#endif  // LENLIFT_BENCHBUILD_HPP_
