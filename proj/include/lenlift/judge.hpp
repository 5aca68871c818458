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

// Pairwise judging behind a hard length gate.
//
// A generation over its limit loses to the baseline without a judge call.
// Otherwise the judge sees the original prompt (never the length-instructed
// one) and the two responses, by default in both orders.

#ifndef LENLIFT_JUDGE_HPP_
#define LENLIFT_JUDGE_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenlift/detail/parallel.hpp"
#include "lenlift/error.hpp"
#include "lenlift/genclient.hpp"
#include "lenlift/records.hpp"
#include "lenlift/wordcount.hpp"

namespace lenlift {

enum class Preference { kFirst, kSecond, kTie };

inline std::string_view to_string(Preference p) {
  switch (p) {
    case Preference::kFirst:
      return "first";
    case Preference::kSecond:
      return "second";
    case Preference::kTie:
      return "tie";
  }
  return "";
}

struct PairwiseResult {
  Preference preferred = Preference::kTie;
  std::string raw_reply;
};

/// Compares two responses to one instruction. Implementations must be safe
/// to call from several threads.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual PairwiseResult compare(std::string_view instruction, std::string_view first,
                                 std::string_view second) = 0;
};

inline constexpr std::string_view kDefaultJudgeSystemPrompt =
    "You are a careful evaluator of AI assistant responses.";

inline constexpr std::string_view kDefaultJudgeTemplate =
    "Two assistants answered the same instruction. Decide which response is better overall, "
    "considering helpfulness, accuracy, relevance and level of detail. Do not let the order "
    "of presentation or the length of the responses influence you.\n"
    "\n"
    "## Instruction\n"
    "\n"
    "{instruction}\n"
    "\n"
    "## Response A\n"
    "\n"
    "{response_a}\n"
    "\n"
    "## Response B\n"
    "\n"
    "{response_b}\n"
    "\n"
    "## Verdict\n"
    "\n"
    "Reply with exactly one letter: A if Response A is better, B if Response B is better.";

/// Single-pass substitution of {instruction}, {response_a} and {response_b};
/// inserted text is never rescanned.
inline std::string render_judge_prompt(std::string_view tmpl, std::string_view instruction,
                                       std::string_view a, std::string_view b) {
  static constexpr std::pair<std::string_view, int> kSlots[] = {
      {"{instruction}", 0}, {"{response_a}", 1}, {"{response_b}", 2}};
  const std::string_view values[] = {instruction, a, b};
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool matched = false;
    for (const auto& [slot, idx] : kSlots) {
      if (tmpl.substr(i).starts_with(slot)) {
        out += values[idx];
        i += slot.size();
        matched = true;
        break;
      }
    }
    if (!matched) out += tmpl[i++];
  }
  return out;
}

inline void validate_judge_template(std::string_view tmpl) {
  for (std::string_view slot : {"{instruction}", "{response_a}", "{response_b}"}) {
    if (tmpl.find(slot) == std::string_view::npos) {
      throw ConfigError("judge template is missing the placeholder " + std::string(slot));
    }
  }
}

/// Reads a verdict. Accepted forms, after trimming whitespace, surrounding
/// quotes/brackets and trailing punctuation, with an optional "Output:",
/// "Verdict:" or "Answer:" prefix: "A"/"a"/"m" (first), "B"/"b"/"M"
/// (second), "tie". Failing that, the first "Output|Verdict|Answer: X" or
/// "Response A/B is better" phrase in the reply decides. Anything else is a
/// tie and bumps `unparsed`.
inline Preference parse_preference(std::string_view raw, std::atomic<std::size_t>* unparsed = nullptr) {
  static const std::regex kPrefix(R"(^\s*(output|verdict|answer|final answer)\s*:\s*)", std::regex::icase);
  // Case-sensitive: "Answer: a good reply" is not a verdict.
  static const std::regex kLabelled(
      R"(\b(?:[Oo]utput|[Vv]erdict|[Aa]nswer|OUTPUT|VERDICT|ANSWER)\s*:\s*["'(\[*]*\s*([ABmM])\b)");
  static const std::regex kPhrase(R"(\b[Rr]esponse\s+([AB])\s+is\s+(?:better|preferred)\b)");
  std::string s(raw);
  s = std::regex_replace(s, kPrefix, "");
  const auto is_trim = [](char c) {
    return std::string_view(" \t\r\n\"'`()[]{}*.,!:;").find(c) != std::string_view::npos;
  };
  std::size_t b = 0, e = s.size();
  while (b < e && is_trim(s[b])) ++b;
  while (e > b && is_trim(s[e - 1])) --e;
  const std::string core = s.substr(b, e - b);
  if (core == "A" || core == "a" || core == "m") return Preference::kFirst;
  if (core == "B" || core == "b" || core == "M") return Preference::kSecond;
  if (core == "tie" || core == "Tie" || core == "TIE") return Preference::kTie;

  const std::string text(raw);
  std::smatch m;
  if (std::regex_search(text, m, kLabelled)) {
    const std::string v = m[1].str();
    return (v == "A" || v == "m") ? Preference::kFirst : Preference::kSecond;
  }
  if (std::regex_search(text, m, kPhrase)) {
    return m[1].str() == "A" ? Preference::kFirst : Preference::kSecond;
  }
  if (unparsed != nullptr) ++*unparsed;
  return Preference::kTie;
}

struct LlmJudgeConfig {
  std::string prompt_template{kDefaultJudgeTemplate};
  std::string system_prompt{kDefaultJudgeSystemPrompt};  // empty: no system message
};

/// Judge backed by a chat-completions endpoint.
class LlmJudge : public Judge {
 public:
  LlmJudge(ChatClient& client, LlmJudgeConfig cfg = {}) : client_(client), cfg_(std::move(cfg)) {
    validate_judge_template(cfg_.prompt_template);
  }

  PairwiseResult compare(std::string_view instruction, std::string_view first,
                         std::string_view second) override {
    std::vector<ChatMessage> messages;
    if (!cfg_.system_prompt.empty()) messages.push_back({"system", cfg_.system_prompt});
    messages.push_back({"user", render_judge_prompt(cfg_.prompt_template, instruction, first, second)});
    std::string reply = client_.complete(messages);
    return {parse_preference(reply, &unparsed_), std::move(reply)};
  }

  std::size_t unparsed_replies() const { return unparsed_; }

 private:
  ChatClient& client_;
  LlmJudgeConfig cfg_;
  std::atomic<std::size_t> unparsed_{0};
};

enum class MockRule { kPreferLonger, kPreferShorter, kPreferLexicographic, kFirst, kSecond, kTie, kHashed };

inline std::optional<MockRule> parse_mock_rule(std::string_view s) {
  static const std::map<std::string_view, MockRule> kRules = {
      {"prefer-longer", MockRule::kPreferLonger},
      {"prefer-shorter", MockRule::kPreferShorter},
      {"prefer-lexicographic", MockRule::kPreferLexicographic},
      {"first", MockRule::kFirst},
      {"second", MockRule::kSecond},
      {"tie", MockRule::kTie},
      {"hashed", MockRule::kHashed}};
  auto it = kRules.find(s);
  if (it == kRules.end()) return std::nullopt;
  return it->second;
}

/// Offline judge whose verdict is a pure function of the two responses.
///   prefer-longer/-shorter: by word count, equal counts tie
///   prefer-lexicographic:   the byte-wise smaller text wins, equal texts tie
///   hashed:                 FNV-1a of (seed, first, second) picks one of three
class MockJudge : public Judge {
 public:
  explicit MockJudge(MockRule rule, std::uint64_t seed = 0) : rule_(rule), seed_(seed) {}

  /// Arbitrary deterministic rule, e.g. for adversarial fuzzing.
  explicit MockJudge(std::function<Preference(std::string_view, std::string_view)> fn)
      : rule_(MockRule::kTie), custom_(std::move(fn)) {}

  PairwiseResult compare(std::string_view, std::string_view first, std::string_view second) override {
    ++calls_;
    const Preference p = custom_ ? custom_(first, second) : decide(first, second);
    return {p, p == Preference::kFirst ? "A" : p == Preference::kSecond ? "B" : "tie"};
  }

  std::size_t calls() const { return calls_; }

 private:
  Preference decide(std::string_view a, std::string_view b) const {
    switch (rule_) {
      case MockRule::kPreferLonger:
      case MockRule::kPreferShorter: {
        const auto la = count_words(a), lb = count_words(b);
        if (la == lb) return Preference::kTie;
        return (la > lb) == (rule_ == MockRule::kPreferLonger) ? Preference::kFirst : Preference::kSecond;
      }
      case MockRule::kPreferLexicographic:
        return a == b ? Preference::kTie : a < b ? Preference::kFirst : Preference::kSecond;
      case MockRule::kFirst:
        return Preference::kFirst;
      case MockRule::kSecond:
        return Preference::kSecond;
      case MockRule::kTie:
        return Preference::kTie;
      case MockRule::kHashed: {
        std::uint64_t h = 0xCBF29CE484222325ULL ^ seed_;
        auto mix = [&h](std::string_view s) {
          for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ULL;
          }
          h ^= 0xFF;
          h *= 0x100000001B3ULL;
        };
        mix(a);
        mix(b);
        return static_cast<Preference>(h % 3);
      }
    }
    return Preference::kTie;
  }

  MockRule rule_;
  std::uint64_t seed_ = 0;
  std::function<Preference(std::string_view, std::string_view)> custom_;
  std::atomic<std::size_t> calls_{0};
};

struct JudgeOptions {
  bool both_orders = true;
};

/// Verdict for one generation. Transport failures of the judge are recorded
/// in Verdict::error (outcome tie) rather than thrown.
inline Verdict gate_and_judge(const BenchmarkEntry& entry, const GenerationRecord& gen, Judge& judge,
                              const JudgeOptions& opts = {}) {
  if (gen.entry_id != entry.id) {
    throw ValidationError("generation " + gen.entry_id + " paired with entry " + entry.id);
  }
  Verdict v;
  v.entry_id = entry.id;
  if (gen.violation) {
    v.outcome = Outcome::kBaselineWin;
    v.gated = true;
    return v;
  }
  if (!entry.baseline) throw ValidationError("entry " + entry.id + " has no baseline to judge against");

  const std::string& candidate = gen.response;
  const std::string& baseline = entry.baseline->response;
  auto to_outcome = [](Preference p, bool candidate_first) {
    if (p == Preference::kTie) return Outcome::kTie;
    return (p == Preference::kFirst) == candidate_first ? Outcome::kCandidateWin : Outcome::kBaselineWin;
  };
  try {
    const auto r1 = judge.compare(entry.original_prompt, candidate, baseline);
    v.judge_raw.push_back(
        Json{{"order", "candidate_first"}, {"reply", r1.raw_reply}, {"preferred", to_string(r1.preferred)}});
    v.outcome = to_outcome(r1.preferred, true);
    if (opts.both_orders) {
      const auto r2 = judge.compare(entry.original_prompt, baseline, candidate);
      v.judge_raw.push_back(
          Json{{"order", "baseline_first"}, {"reply", r2.raw_reply}, {"preferred", to_string(r2.preferred)}});
      if (to_outcome(r2.preferred, false) != v.outcome) v.outcome = Outcome::kTie;
    }
  } catch (const TransportError& e) {
    v.outcome = Outcome::kTie;
    v.error = e.what();
  }
  return v;
}

/// Judges every generation whose entry has a baseline; entries without one
/// are skipped. Output is ordered by entry id.
inline std::vector<Verdict> judge_benchmark(std::span<const BenchmarkEntry> bench,
                                            std::span<const GenerationRecord> gens, Judge& judge,
                                            const JudgeOptions& opts, std::size_t concurrency) {
  std::map<std::string_view, const BenchmarkEntry*> by_id;
  for (const auto& e : bench) by_id.emplace(e.id, &e);
  std::vector<std::pair<const BenchmarkEntry*, const GenerationRecord*>> work;
  std::set<std::string_view> seen;
  for (const auto& g : gens) {
    auto it = by_id.find(g.entry_id);
    if (it == by_id.end()) throw ValidationError("generation for unknown entry " + g.entry_id);
    if (!seen.insert(g.entry_id).second) throw ValidationError("two generations for entry " + g.entry_id);
    if (it->second->baseline) work.emplace_back(it->second, &g);
  }
  std::sort(work.begin(), work.end(),
            [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
  std::vector<Verdict> out(work.size());
  detail::parallel_for(work.size(), concurrency, [&](std::size_t i) {
    out[i] = gate_and_judge(*work[i].first, *work[i].second, judge, opts);
  });
  return out;
}

}  // namespace lenlift

#endif  // LENLIFT_JUDGE_HPP_
