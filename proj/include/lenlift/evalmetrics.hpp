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

// Violation rate, gated win rate and mean length, plus the scale sweep.

#ifndef LENLIFT_EVALMETRICS_HPP_
#define LENLIFT_EVALMETRICS_HPP_

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenlift/benchbuild.hpp"
#include "lenlift/error.hpp"
#include "lenlift/judge.hpp"
#include "lenlift/records.hpp"

namespace lenlift {

enum class TiePolicy { kHalfWin, kDrop };

inline std::string_view to_string(TiePolicy p) { return p == TiePolicy::kHalfWin ? "half_win" : "drop"; }

inline std::optional<TiePolicy> parse_tie_policy(std::string_view s) {
  if (s == "half_win") return TiePolicy::kHalfWin;
  if (s == "drop") return TiePolicy::kDrop;
  return std::nullopt;
}

/// Rounds to one decimal, halves away from zero.
inline double round1(double x) { return std::round(x * 10.0) / 10.0; }

/// Percentage of over-limit generations; failed generations count as
/// violations.
inline double violation_rate(std::span<const GenerationRecord> gens) {
  if (gens.empty()) throw ValidationError("violation rate of an empty run");
  std::size_t v = 0;
  for (const auto& g : gens) v += g.violation ? 1 : 0;
  return 100.0 * static_cast<double>(v) / static_cast<double>(gens.size());
}

inline std::size_t failure_count(std::span<const GenerationRecord> gens) {
  std::size_t n = 0;
  for (const auto& g : gens) n += g.failed() ? 1 : 0;
  return n;
}

struct OutcomeCounts {
  std::size_t wins = 0;
  std::size_t losses = 0;  // includes gated verdicts
  std::size_t ties = 0;
  std::size_t errors = 0;  // judge failures, outside the other three

  std::size_t judged() const { return wins + losses + ties; }
};

inline OutcomeCounts count_outcomes(std::span<const Verdict> verdicts) {
  OutcomeCounts c;
  for (const auto& v : verdicts) {
    if (v.failed()) {
      ++c.errors;
    } else if (v.outcome == Outcome::kCandidateWin) {
      ++c.wins;
    } else if (v.outcome == Outcome::kBaselineWin) {
      ++c.losses;
    } else {
      ++c.ties;
    }
  }
  return c;
}

/// half_win: 100 * (wins + ties / 2) / n. drop: 100 * wins / (wins + losses).
/// Verdicts whose judge call failed are left out of both.
inline double win_rate(std::span<const Verdict> verdicts, TiePolicy policy = TiePolicy::kHalfWin) {
  if (verdicts.empty()) throw ValidationError("win rate of an empty run");
  const auto c = count_outcomes(verdicts);
  if (c.judged() == 0) throw ValidationError("no verdicts without judge errors");
  if (policy == TiePolicy::kHalfWin) {
    return 100.0 * (static_cast<double>(c.wins) + 0.5 * static_cast<double>(c.ties)) /
           static_cast<double>(c.judged());
  }
  if (c.wins + c.losses == 0) throw ValidationError("no decidable comparisons");
  return 100.0 * static_cast<double>(c.wins) / static_cast<double>(c.wins + c.losses);
}

/// Mean word count over generations that produced a response.
inline double mean_words(std::span<const GenerationRecord> gens) {
  if (gens.empty()) throw ValidationError("mean length of an empty run");
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : gens) {
    if (g.failed()) continue;
    total += static_cast<double>(g.word_count);
    ++n;
  }
  if (n == 0) throw ValidationError("mean length undefined: every generation failed");
  return total / static_cast<double>(n);
}

/// Checks that generations and verdicts line up with the benchmark: one
/// generation per entry, violation flags agree with the targets, and a
/// verdict is gated exactly when its generation violates.
inline void check_run(std::span<const BenchmarkEntry> bench, std::span<const GenerationRecord> gens,
                      std::span<const Verdict> verdicts) {
  std::map<std::string_view, const BenchmarkEntry*> entries;
  for (const auto& e : bench) entries.emplace(e.id, &e);
  std::map<std::string_view, const GenerationRecord*> by_entry;
  for (const auto& g : gens) {
    auto it = entries.find(g.entry_id);
    if (it == entries.end()) throw ValidationError("generation for unknown entry " + g.entry_id);
    if (!by_entry.emplace(g.entry_id, &g).second) {
      throw ValidationError("two generations for entry " + g.entry_id);
    }
    if (!g.failed() && g.violation != (g.word_count > it->second->target_len)) {
      throw ValidationError("generation " + g.entry_id + " has a violation flag inconsistent with target " +
                            std::to_string(it->second->target_len));
    }
  }
  if (by_entry.size() != entries.size()) {
    for (const auto& [id, e] : entries) {
      if (!by_entry.contains(id)) throw ValidationError("no generation for entry " + std::string(id));
    }
  }
  std::set<std::string_view> judged;
  for (const auto& v : verdicts) {
    auto it = by_entry.find(v.entry_id);
    if (it == by_entry.end()) throw ValidationError("verdict for unknown entry " + v.entry_id);
    if (!judged.insert(v.entry_id).second) throw ValidationError("two verdicts for entry " + v.entry_id);
    if (v.gated != it->second->violation) {
      throw ValidationError("verdict " + v.entry_id + (v.gated ? " is gated but its generation complies"
                                                               : " is not gated but its generation violates"));
    }
  }
}

/// Summary of one run, rounded to one decimal. `win_rate` is set only when
/// there are verdicts with a usable judgement; `failures` counts failed
/// generations plus failed judge calls.
inline EvalSummary summarize(std::span<const BenchmarkEntry> bench, std::span<const GenerationRecord> gens,
                             std::span<const Verdict> verdicts, TiePolicy policy = TiePolicy::kHalfWin,
                             double scale = 1.0) {
  check_run(bench, gens, verdicts);
  EvalSummary s;
  s.n = gens.size();
  s.violation_rate = round1(violation_rate(gens));
  s.mean_words = round1(mean_words(gens));
  s.scale = scale;
  const auto counts = count_outcomes(verdicts);
  if (counts.judged() > 0) s.win_rate = round1(win_rate(verdicts, policy));
  s.failures = failure_count(gens) + counts.errors;
  return s;
}

/// Generates responses for a (scaled) benchmark.
using GenerateFn = std::function<std::vector<GenerationRecord>(std::span<const BenchmarkEntry>)>;

struct SweepJudge {
  Judge* judge = nullptr;
  JudgeOptions options;
  TiePolicy tie_policy = TiePolicy::kHalfWin;
  std::size_t concurrency = 1;
};

struct SweepResult {
  std::string series;
  std::vector<EvalSummary> points;  // one per factor, in factor order

  Json to_json() const {
    Json pts = Json::array();
    for (const auto& p : points) pts.push_back(RecordSchema<EvalSummary>::to_json(p));
    return Json{{"series", series}, {"points", std::move(pts)}};
  }

  static SweepResult from_json(const Json& j) {
    if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
      throw ValidationError("sweep result needs a points array");
    }
    SweepResult r;
    if (j.contains("series") && j["series"].is_string()) r.series = j["series"].get<std::string>();
    std::size_t i = 0;
    for (const auto& p : j["points"]) {
      try {
        r.points.push_back(RecordSchema<EvalSummary>::from_json(p, i++));
      } catch (const FieldError& e) {
        throw ValidationError("point " + std::to_string(i) + ": " + e.what());
      }
    }
    return r;
  }
};

/// For each factor: scale the benchmark, generate, judge the entries that
/// still have a baseline (when a judge is given) and summarize.
inline SweepResult run_sweep(std::span<const BenchmarkEntry> bench, const ScaleSpec& spec,
                             const GenerateFn& generate, std::optional<SweepJudge> judge = std::nullopt,
                             std::string series = "model") {
  spec.validate();
  if (bench.empty()) throw ValidationError("benchmark is empty");
  SweepResult result;
  result.series = std::move(series);
  for (double factor : spec.factors) {
    const auto scaled = scale_benchmark(bench, factor);
    const auto gens = generate(scaled);
    std::vector<Verdict> verdicts;
    TiePolicy policy = TiePolicy::kHalfWin;
    if (judge && judge->judge != nullptr) {
      verdicts = judge_benchmark(scaled, gens, *judge->judge, judge->options, judge->concurrency);
      policy = judge->tie_policy;
    }
    result.points.push_back(summarize(scaled, gens, verdicts, policy, factor));
  }
  return result;
}

}  // namespace lenlift

#endif  // LENLIFT_EVALMETRICS_HPP_
