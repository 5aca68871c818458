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

// Record types shared by every pipeline stage and their JSONL schemas.
//
// Each record type has a `RecordSchema<T>` specialization that fixes the key
// order on output and validates every field on input. Field errors are
// reported as FieldError and the JSONL loader prefixes the line number.

#ifndef LENLIFT_RECORDS_HPP_
#define LENLIFT_RECORDS_HPP_

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lenlift/error.hpp"
#include "lenlift/wordcount.hpp"

namespace lenlift {

using Json = nlohmann::ordered_json;

/// (x, y^w, y^l): a prompt with its preferred and dispreferred responses.
struct PreferenceTriple {
  std::string id;
  std::string prompt;
  std::string chosen;
  std::string rejected;

  bool operator==(const PreferenceTriple&) const = default;
};

enum class CaseTag {
  kLongerChosenSlack,
  kLongerChosenBinding,
  kShorterChosenSlack,
  kShorterChosenBinding,
};

inline std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::kLongerChosenSlack:
      return "longer-chosen/slack";
    case CaseTag::kLongerChosenBinding:
      return "longer-chosen/binding";
    case CaseTag::kShorterChosenSlack:
      return "shorter-chosen/slack";
    case CaseTag::kShorterChosenBinding:
      return "shorter-chosen/binding";
  }
  return "";
}

inline std::optional<CaseTag> parse_case_tag(std::string_view s) {
  for (auto tag : {CaseTag::kLongerChosenSlack, CaseTag::kLongerChosenBinding,
                   CaseTag::kShorterChosenSlack, CaseTag::kShorterChosenBinding}) {
    if (to_string(tag) == s) return tag;
  }
  return std::nullopt;
}

/// A length-instructed preference pair derived from one triple.
struct AugmentedPair {
  std::string source_id;
  std::string li_prompt;
  std::size_t max_len = 0;
  std::string winner;
  std::string loser;
  bool flipped = false;  // the original chosen response became the loser
  CaseTag case_tag = CaseTag::kLongerChosenSlack;

  bool operator==(const AugmentedPair&) const = default;
};

struct Baseline {
  std::string response;
  std::string source;  // label of the reference model

  bool operator==(const Baseline&) const = default;
};

struct BenchmarkEntry {
  std::string id;
  std::string original_prompt;
  std::string li_prompt;
  std::size_t target_len = 0;
  // Absent when scaling left no compliant reference; such entries only feed
  // the violation rate.
  std::optional<Baseline> baseline;

  bool operator==(const BenchmarkEntry&) const = default;
};

struct GenerationRecord {
  std::string entry_id;
  std::string model_label;
  std::string response;
  std::size_t word_count = 0;
  bool violation = false;
  // Set when the model could not produce a response. Failed records are
  // violations with an empty response.
  std::optional<std::string> error;

  bool failed() const { return error.has_value(); }
  bool operator==(const GenerationRecord&) const = default;
};

enum class Outcome { kCandidateWin, kBaselineWin, kTie };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kCandidateWin:
      return "candidate_win";
    case Outcome::kBaselineWin:
      return "baseline_win";
    case Outcome::kTie:
      return "tie";
  }
  return "";
}

inline std::optional<Outcome> parse_outcome(std::string_view s) {
  for (auto o : {Outcome::kCandidateWin, Outcome::kBaselineWin, Outcome::kTie}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

struct Verdict {
  std::string entry_id;
  Outcome outcome = Outcome::kTie;
  bool gated = false;           // decided by the length gate, no judge call
  Json judge_raw = Json::array();  // judge exchanges, empty when gated
  // Judge transport failure; such verdicts are left out of the win rate.
  std::optional<std::string> error;

  bool failed() const { return error.has_value(); }
  bool operator==(const Verdict&) const = default;
};

struct EvalSummary {
  std::size_t n = 0;
  double violation_rate = 0.0;      // percent
  std::optional<double> win_rate;   // percent; absent when nothing was judged
  double mean_words = 0.0;
  double scale = 1.0;
  std::size_t failures = 0;

  bool operator==(const EvalSummary&) const = default;
};

/// Input prompt for benchmark construction.
struct PromptRecord {
  std::string id;
  std::string prompt;

  bool operator==(const PromptRecord&) const = default;
};

/// One reference model's answer to a benchmark prompt.
struct ReferenceGeneration {
  std::string prompt_id;
  std::string model_label;
  std::string response;

  bool operator==(const ReferenceGeneration&) const = default;
};

/// Id given to records whose source carries none.
inline std::string row_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "row-%06zu", index);
  return buf;
}

/// A problem with one field of one record.
class FieldError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

namespace detail {

inline const Json& require(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw FieldError(std::string("missing field ") + field);
  return *it;
}

inline std::string require_string(const Json& j, const char* field, bool non_empty = true) {
  const Json& v = require(j, field);
  if (!v.is_string()) throw FieldError(std::string("field ") + field + " must be a string");
  auto s = v.get<std::string>();
  if (non_empty && s.empty()) throw FieldError(std::string("field ") + field + " must be non-empty");
  return s;
}

inline std::size_t require_count(const Json& j, const char* field, std::size_t min) {
  const Json& v = require(j, field);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw FieldError(std::string("field ") + field + " must be a non-negative integer");
  }
  const auto n = v.get<std::size_t>();
  if (n < min) {
    throw FieldError(std::string("field ") + field + " must be at least " + std::to_string(min));
  }
  return n;
}

inline bool require_bool(const Json& j, const char* field) {
  const Json& v = require(j, field);
  if (!v.is_boolean()) throw FieldError(std::string("field ") + field + " must be a boolean");
  return v.get<bool>();
}

inline double require_number(const Json& j, const char* field) {
  const Json& v = require(j, field);
  if (!v.is_number()) throw FieldError(std::string("field ") + field + " must be a number");
  return v.get<double>();
}

inline std::optional<std::string> optional_string(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw FieldError(std::string("field ") + field + " must be a string");
  return it->get<std::string>();
}

}  // namespace detail

/// Serialization contract for a record type. `index` is the 0-based record
/// position, used to synthesize ids where the schema allows it.
template <typename T>
struct RecordSchema;

template <>
struct RecordSchema<PreferenceTriple> {
  static Json to_json(const PreferenceTriple& t) {
    return Json{{"id", t.id}, {"prompt", t.prompt}, {"chosen", t.chosen}, {"rejected", t.rejected}};
  }
  static PreferenceTriple from_json(const Json& j, std::size_t index) {
    PreferenceTriple t;
    t.id = j.contains("id") ? detail::require_string(j, "id") : row_id(index);
    t.prompt = detail::require_string(j, "prompt");
    t.chosen = detail::require_string(j, "chosen");
    t.rejected = detail::require_string(j, "rejected");
    return t;
  }
  static const std::string& key(const PreferenceTriple& t) { return t.id; }
};

template <>
struct RecordSchema<AugmentedPair> {
  static Json to_json(const AugmentedPair& p) {
    return Json{{"source_id", p.source_id}, {"li_prompt", p.li_prompt},
                {"max_len", p.max_len},     {"winner", p.winner},
                {"loser", p.loser},         {"flipped", p.flipped},
                {"case_tag", to_string(p.case_tag)}};
  }
  static AugmentedPair from_json(const Json& j, std::size_t) {
    AugmentedPair p;
    p.source_id = detail::require_string(j, "source_id");
    p.li_prompt = detail::require_string(j, "li_prompt");
    p.max_len = detail::require_count(j, "max_len", 1);
    p.winner = detail::require_string(j, "winner");
    p.loser = detail::require_string(j, "loser");
    p.flipped = detail::require_bool(j, "flipped");
    const auto tag = parse_case_tag(detail::require_string(j, "case_tag"));
    if (!tag) throw FieldError("field case_tag has an unknown value");
    p.case_tag = *tag;
    if (p.flipped != (p.case_tag == CaseTag::kLongerChosenBinding)) {
      throw FieldError("field flipped disagrees with case_tag");
    }
    return p;
  }
};

template <>
struct RecordSchema<BenchmarkEntry> {
  static Json to_json(const BenchmarkEntry& e) {
    Json j{{"id", e.id},
           {"original_prompt", e.original_prompt},
           {"li_prompt", e.li_prompt},
           {"target_len", e.target_len}};
    if (e.baseline) {
      j["baseline_response"] = e.baseline->response;
      j["baseline_source"] = e.baseline->source;
    } else {
      j["baseline_response"] = nullptr;
      j["baseline_source"] = nullptr;
    }
    return j;
  }
  static BenchmarkEntry from_json(const Json& j, std::size_t) {
    BenchmarkEntry e;
    e.id = detail::require_string(j, "id");
    e.original_prompt = detail::require_string(j, "original_prompt");
    e.li_prompt = detail::require_string(j, "li_prompt");
    e.target_len = detail::require_count(j, "target_len", 1);
    detail::require(j, "baseline_response");
    detail::require(j, "baseline_source");
    auto response = detail::optional_string(j, "baseline_response");
    auto source = detail::optional_string(j, "baseline_source");
    if (response.has_value() != source.has_value()) {
      throw FieldError("fields baseline_response and baseline_source must both be set or both null");
    }
    if (response) {
      if (count_words(*response) > e.target_len) {
        throw FieldError("field baseline_response exceeds target_len");
      }
      e.baseline = Baseline{std::move(*response), std::move(*source)};
    }
    return e;
  }
  static const std::string& key(const BenchmarkEntry& e) { return e.id; }
};

template <>
struct RecordSchema<GenerationRecord> {
  static Json to_json(const GenerationRecord& g) {
    Json j{{"entry_id", g.entry_id},     {"model_label", g.model_label},
           {"response", g.response},     {"word_count", g.word_count},
           {"violation", g.violation}};
    if (g.error) j["error"] = *g.error;
    return j;
  }
  static GenerationRecord from_json(const Json& j, std::size_t) {
    GenerationRecord g;
    g.entry_id = detail::require_string(j, "entry_id");
    g.model_label = detail::require_string(j, "model_label");
    g.response = detail::require_string(j, "response", /*non_empty=*/false);
    g.word_count = detail::require_count(j, "word_count", 0);
    g.violation = detail::require_bool(j, "violation");
    g.error = detail::optional_string(j, "error");
    if (g.failed()) {
      if (!g.violation) throw FieldError("field violation must be true for a failed generation");
    } else if (g.word_count != count_words(g.response)) {
      throw FieldError("field word_count does not match the response");
    }
    return g;
  }
  static const std::string& key(const GenerationRecord& g) { return g.entry_id; }
};

template <>
struct RecordSchema<Verdict> {
  static Json to_json(const Verdict& v) {
    Json j{{"entry_id", v.entry_id},
           {"outcome", to_string(v.outcome)},
           {"gated", v.gated},
           {"judge_raw", v.judge_raw}};
    if (v.error) j["error"] = *v.error;
    return j;
  }
  static Verdict from_json(const Json& j, std::size_t) {
    Verdict v;
    v.entry_id = detail::require_string(j, "entry_id");
    const auto outcome = parse_outcome(detail::require_string(j, "outcome"));
    if (!outcome) throw FieldError("field outcome has an unknown value");
    v.outcome = *outcome;
    v.gated = detail::require_bool(j, "gated");
    v.judge_raw = detail::require(j, "judge_raw");
    v.error = detail::optional_string(j, "error");
    if (v.gated && v.outcome != Outcome::kBaselineWin) {
      throw FieldError("field outcome must be baseline_win for a gated verdict");
    }
    return v;
  }
  static const std::string& key(const Verdict& v) { return v.entry_id; }
};

template <>
struct RecordSchema<EvalSummary> {
  static Json to_json(const EvalSummary& s) {
    Json j{{"n", s.n}, {"violation_rate", s.violation_rate}};
    if (s.win_rate) {
      j["win_rate"] = *s.win_rate;
    } else {
      j["win_rate"] = nullptr;
    }
    j["mean_words"] = s.mean_words;
    j["scale"] = s.scale;
    j["failures"] = s.failures;
    return j;
  }
  static EvalSummary from_json(const Json& j, std::size_t) {
    EvalSummary s;
    s.n = detail::require_count(j, "n", 1);
    s.violation_rate = detail::require_number(j, "violation_rate");
    if (const Json& w = detail::require(j, "win_rate"); !w.is_null()) {
      s.win_rate = detail::require_number(j, "win_rate");
    }
    s.mean_words = detail::require_number(j, "mean_words");
    s.scale = detail::require_number(j, "scale");
    s.failures = detail::require_count(j, "failures", 0);
    return s;
  }
};

template <>
struct RecordSchema<PromptRecord> {
  static Json to_json(const PromptRecord& p) { return Json{{"id", p.id}, {"prompt", p.prompt}}; }
  static PromptRecord from_json(const Json& j, std::size_t index) {
    PromptRecord p;
    p.id = j.contains("id") ? detail::require_string(j, "id") : row_id(index);
    p.prompt = detail::require_string(j, "prompt");
    return p;
  }
  static const std::string& key(const PromptRecord& p) { return p.id; }
};

template <>
struct RecordSchema<ReferenceGeneration> {
  static Json to_json(const ReferenceGeneration& r) {
    return Json{{"prompt_id", r.prompt_id}, {"model_label", r.model_label}, {"response", r.response}};
  }
  static ReferenceGeneration from_json(const Json& j, std::size_t) {
    ReferenceGeneration r;
    r.prompt_id = detail::require_string(j, "prompt_id");
    r.model_label = detail::require_string(j, "model_label");
    r.response = detail::require_string(j, "response");
    return r;
  }
};

template <typename T>
Json to_json(const T& record) {
  return RecordSchema<T>::to_json(record);
}

/// Compact, key-ordered UTF-8 text of a JSON value. Invalid UTF-8 is rejected.
inline std::string canonical_dump(const Json& j) {
  try {
    return j.dump(-1, ' ', false, Json::error_handler_t::strict);
  } catch (const Json::type_error& e) {
    throw ValidationError(std::string("cannot serialize record: ") + e.what());
  }
}

}  // namespace lenlift

#endif  // LENLIFT_RECORDS_HPP_
