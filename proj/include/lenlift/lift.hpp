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

// Length-instruction augmentation of preference triples.
//
// Every triple whose responses differ by at least `threshold` words yields two
// length-instructed pairs:
//
//   chosen longer (lw > ll)
//     slack:   max_len = lw + T, chosen wins.
//     binding: max_len drawn from [ll, lw), so the chosen response violates
//              the instruction and the rejected response becomes the winner.
//   chosen shorter (lw < ll)
//     slack:   max_len = ll + T, chosen wins.
//     binding: max_len drawn from [lw, ll), chosen still wins.
//
// The upper bound of the drawn interval is exclusive so that the longer
// response strictly exceeds the limit ("N words or less" admits N words).

#ifndef LENLIFT_LIFT_HPP_
#define LENLIFT_LIFT_HPP_

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenlift/error.hpp"
#include "lenlift/records.hpp"
#include "lenlift/wordcount.hpp"

namespace lenlift {

inline constexpr std::string_view kMaxLenPlaceholder = "<MAX_LEN>";
inline constexpr std::string_view kInstructionPlaceholder = "<ORIGINAL_INSTRUCTION>";
inline constexpr std::string_view kLengthInstructionTemplate =
    "Answer the following instruction using <MAX_LEN> words or less.\n\n<ORIGINAL_INSTRUCTION>";

/// Fills both placeholders of `tmpl` in one pass; the prompt is inserted
/// verbatim and never rescanned.
inline std::string render_template(std::string_view prompt, std::size_t max_len,
                                   std::string_view tmpl = kLengthInstructionTemplate) {
  std::string out;
  out.reserve(tmpl.size() + prompt.size() + 8);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i).starts_with(kMaxLenPlaceholder)) {
      out += std::to_string(max_len);
      i += kMaxLenPlaceholder.size();
    } else if (tmpl.substr(i).starts_with(kInstructionPlaceholder)) {
      out += prompt;
      i += kInstructionPlaceholder.size();
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

struct LiftConfig {
  std::size_t threshold = 10;  // minimum word-count gap, T
  std::uint64_t seed = 0;
  std::string instruction_template{kLengthInstructionTemplate};

  void validate() const {
    if (threshold < 1) throw ConfigError("threshold must be at least 1");
    if (instruction_template.find(kMaxLenPlaceholder) == std::string::npos ||
        instruction_template.find(kInstructionPlaceholder) == std::string::npos) {
      throw ConfigError("instruction template must contain <MAX_LEN> and <ORIGINAL_INSTRUCTION>");
    }
  }
};

struct AugmentationStats {
  std::size_t n_input = 0;
  std::size_t n_filtered_close = 0;
  std::size_t n_chosen_longer = 0;
  std::size_t n_chosen_shorter = 0;
  std::size_t n_output = 0;
  std::size_t n_flipped = 0;

  bool operator==(const AugmentationStats&) const = default;

  Json to_json() const {
    return Json{{"n_input", n_input},
                {"n_filtered_close", n_filtered_close},
                {"n_chosen_longer", n_chosen_longer},
                {"n_chosen_shorter", n_chosen_shorter},
                {"n_output", n_output},
                {"n_flipped", n_flipped}};
  }
};

/// Draws a uniform integer from [lo, hi); callers guarantee lo < hi.
template <typename S>
concept IntervalSampler = requires(S& s, std::size_t lo, std::size_t hi) {
  { s(lo, hi) } -> std::convertible_to<std::size_t>;
};

/// Deterministic sampler keyed by (seed, triple id), so a triple's draws do
/// not depend on its position in the dataset. Uses mt19937_64, whose output
/// sequence is fixed by the standard, and its own rejection step instead of
/// std::uniform_int_distribution, whose algorithm is implementation-defined.
class KeyedSampler {
 public:
  KeyedSampler(std::uint64_t seed, std::string_view key) : engine_(mix(seed, key)) {}

  std::size_t operator()(std::size_t lo, std::size_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::size_t>(x % range);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix(std::uint64_t seed, std::string_view key) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : key) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    return splitmix64(splitmix64(seed) ^ h);
  }

  std::mt19937_64 engine_;
};

/// Augments one triple into zero or two pairs. Returns nothing when the
/// word counts differ by less than the threshold, or when no positive limit
/// separates the two responses (only possible with threshold 1 and a
/// zero-word response).
template <IntervalSampler Sampler>
std::vector<AugmentedPair> augment_triple(const PreferenceTriple& t, const LiftConfig& cfg,
                                          Sampler&& sample) {
  const std::size_t lw = count_words(t.chosen);
  const std::size_t ll = count_words(t.rejected);
  const std::size_t gap = lw > ll ? lw - ll : ll - lw;
  if (gap < cfg.threshold) return {};

  const bool chosen_longer = lw > ll;
  const std::size_t shorter = chosen_longer ? ll : lw;
  const std::size_t longer = chosen_longer ? lw : ll;
  const std::size_t lo = std::max<std::size_t>(shorter, 1);
  if (lo >= longer) return {};

  auto make = [&](std::size_t max_len, bool flip, CaseTag tag) {
    AugmentedPair p;
    p.source_id = t.id;
    p.li_prompt = render_template(t.prompt, max_len, cfg.instruction_template);
    p.max_len = max_len;
    p.winner = flip ? t.rejected : t.chosen;
    p.loser = flip ? t.chosen : t.rejected;
    p.flipped = flip;
    p.case_tag = tag;
    return p;
  };

  std::vector<AugmentedPair> out;
  out.reserve(2);
  const std::size_t binding_len = sample(lo, longer);
  if (chosen_longer) {
    out.push_back(make(lw + cfg.threshold, false, CaseTag::kLongerChosenSlack));
    out.push_back(make(binding_len, true, CaseTag::kLongerChosenBinding));
  } else {
    out.push_back(make(ll + cfg.threshold, false, CaseTag::kShorterChosenSlack));
    out.push_back(make(binding_len, false, CaseTag::kShorterChosenBinding));
  }
  return out;
}

struct AugmentationResult {
  std::vector<AugmentedPair> pairs;
  AugmentationStats stats;
};

inline AugmentationResult augment_dataset(std::span<const PreferenceTriple> triples,
                                          const LiftConfig& cfg) {
  cfg.validate();
  AugmentationResult result;
  auto& stats = result.stats;
  stats.n_input = triples.size();
  result.pairs.reserve(2 * triples.size());
  for (const auto& t : triples) {
    auto pairs = augment_triple(t, cfg, KeyedSampler(cfg.seed, t.id));
    if (pairs.empty()) {
      ++stats.n_filtered_close;
      continue;
    }
    if (pairs.front().case_tag == CaseTag::kLongerChosenSlack) {
      ++stats.n_chosen_longer;
    } else {
      ++stats.n_chosen_shorter;
    }
    for (auto& p : pairs) {
      if (p.flipped) ++stats.n_flipped;
      result.pairs.push_back(std::move(p));
    }
  }
  stats.n_output = result.pairs.size();
  return result;
}

/// The training mixture: every original triple followed by every augmented
/// pair as a triple with id "<source_id>#slack" or "<source_id>#binding".
/// No deduplication.
inline std::vector<PreferenceTriple> training_union(std::span<const PreferenceTriple> original,
                                                    std::span<const AugmentedPair> augmented) {
  std::vector<PreferenceTriple> out(original.begin(), original.end());
  out.reserve(original.size() + augmented.size());
  for (const auto& p : augmented) {
    const bool slack =
        p.case_tag == CaseTag::kLongerChosenSlack || p.case_tag == CaseTag::kShorterChosenSlack;
    out.push_back(PreferenceTriple{p.source_id + (slack ? "#slack" : "#binding"), p.li_prompt,
                                   p.winner, p.loser});
  }
  return out;
}

}  // namespace lenlift

#endif  // LENLIFT_LIFT_HPP_
