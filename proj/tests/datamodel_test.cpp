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

#include "lenlift/jsonl.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lenlift/records.hpp"

namespace lenlift {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("lenlift-dm-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(LoadTriples, TwoValidLines) {
  TempDir dir;
  const auto path = dir.path() / "d.jsonl";
  write_text(path,
             R"({"id":"a","prompt":"p1","chosen":"c1","rejected":"r1"})"
             "\n"
             R"({"id":"b","prompt":"p2","chosen":"c2","rejected":"r2"})"
             "\n");
  const auto triples = load_triples(path);
  ASSERT_EQ(triples.size(), 2u);
  EXPECT_EQ(triples[1], (PreferenceTriple{"b", "p2", "c2", "r2"}));
}

TEST(LoadTriples, MissingFieldNamesLine) {
  std::string text;
  for (int i = 0; i < 4; ++i) {
    text += R"({"id":"t)" + std::to_string(i) + R"(","prompt":"p","chosen":"c","rejected":"r"})" "\n";
  }
  text += R"({"id":"t4","prompt":"p","rejected":"r"})" "\n";
  std::istringstream in(text);
  EXPECT_EQ(error_of([&] { parse_jsonl<PreferenceTriple>(in); }), "line 5: missing field chosen");
}

TEST(LoadTriples, PathPrefixesErrors) {
  TempDir dir;
  const auto path = dir.path() / "bad.jsonl";
  write_text(path, "{\"prompt\":\"p\",\"chosen\":\"\",\"rejected\":\"r\"}\n");
  EXPECT_EQ(error_of([&] { load_triples(path); }),
            path.string() + ": line 1: field chosen must be non-empty");
}

TEST(LoadTriples, EmptyFileWarns) {
  TempDir dir;
  const auto path = dir.path() / "empty.jsonl";
  write_text(path, "");
  testing::internal::CaptureStderr();
  EXPECT_TRUE(load_triples(path).empty());
  EXPECT_NE(testing::internal::GetCapturedStderr().find("contains no records"), std::string::npos);
}

TEST(LoadTriples, DuplicateId) {
  std::istringstream in(R"({"id":"x","prompt":"p","chosen":"c","rejected":"r"})" "\n\n"
                        R"({"id":"x","prompt":"q","chosen":"c","rejected":"r"})" "\n");
  EXPECT_EQ(error_of([&] { parse_jsonl<PreferenceTriple>(in); }),
            "line 3: duplicate id x (first seen on line 1)");
}

TEST(LoadTriples, MalformedJsonAndNonObject) {
  std::istringstream bad("{\"id\":\n");
  EXPECT_EQ(error_of([&] { parse_jsonl<PreferenceTriple>(bad); }).rfind("line 1: invalid JSON", 0),
            0u);
  std::istringstream arr("[1,2]\n");
  EXPECT_EQ(error_of([&] { parse_jsonl<PreferenceTriple>(arr); }), "line 1: expected a JSON object");
}

TEST(LoadTriples, MissingIdsAreAssigned) {
  std::istringstream in(R"({"prompt":"p","chosen":"c","rejected":"r"})" "\n"
                        R"({"prompt":"p","chosen":"c","rejected":"r"})" "\n");
  const auto triples = parse_jsonl<PreferenceTriple>(in);
  ASSERT_EQ(triples.size(), 2u);
  EXPECT_EQ(triples[0].id, "row-000000");
  EXPECT_EQ(triples[1].id, "row-000001");
}

TEST(LoadJsonl, MissingFileIsIoError) {
  EXPECT_THROW(load_triples("/nonexistent/lenlift/x.jsonl"), IoError);
}

TEST(WriteJsonl, EmbeddedNewlineStaysOnOneLine) {
  const std::vector<GenerationRecord> gens = {
      {"e1", "m", "line one\nline two", count_words("line one\nline two"), false, std::nullopt}};
  const auto text = format_jsonl(std::span<const GenerationRecord>(gens));
  EXPECT_EQ(text,
            R"({"entry_id":"e1","model_label":"m","response":"line one\nline two","word_count":4,"violation":false})"
            "\n");
}

TEST(WriteJsonl, FixedKeyOrder) {
  const std::vector<BenchmarkEntry> bench = {{"p1", "orig", "li", 5, std::nullopt}};
  EXPECT_EQ(format_jsonl(std::span<const BenchmarkEntry>(bench)),
            R"({"id":"p1","original_prompt":"orig","li_prompt":"li","target_len":5,"baseline_response":null,"baseline_source":null})"
            "\n");
}

TEST(WriteJsonl, InvalidUtf8IsRejected) {
  const std::vector<PreferenceTriple> bad = {{"a", "p\xFF", "c", "r"}};
  EXPECT_THROW(format_jsonl(std::span<const PreferenceTriple>(bad)), ValidationError);
}

TEST(WriteJsonl, UnwritablePathCarriesPath) {
  const std::vector<PreferenceTriple> t = {{"a", "p", "c", "r"}};
  const auto msg = error_of([&] { write_jsonl(t, "/nonexistent/lenlift/out.jsonl"); });
  EXPECT_NE(msg.find("/nonexistent/lenlift/out.jsonl"), std::string::npos);
}

std::string random_string(std::mt19937_64& rng, bool allow_empty = false) {
  static const std::vector<std::string> kPieces = {
      "a", "Word", " ", "\n", "\t", "\"", "\\", "/", "caf\xC3\xA9", "\xE2\x80\x94", "\xF0\x9F\x98\x80",
      "{", "}", "\x01", "don't", "..."};
  std::uniform_int_distribution<std::size_t> pick(0, kPieces.size() - 1);
  std::uniform_int_distribution<int> len(allow_empty ? 0 : 1, 12);
  std::string s;
  for (int n = len(rng); n > 0; --n) s += kPieces[pick(rng)];
  return s;
}

template <typename T>
void expect_round_trip(const std::vector<T>& records) {
  TempDir dir;
  const auto a = dir.path() / "a.jsonl";
  const auto b = dir.path() / "b.jsonl";
  write_jsonl(records, a);
  write_jsonl(records, b);
  EXPECT_EQ(read_text(a), read_text(b));
  const auto loaded = load_jsonl<T>(a);
  EXPECT_EQ(loaded, records);
  for (std::size_t i = 0; i < loaded.size(); ++i) EXPECT_EQ(loaded[i], records[i]) << i;
  // Every record occupies exactly one line.
  const auto text = read_text(a);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), records.size());
}

TEST(RoundTrip, AllRecordTypes) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 20; ++round) {
    std::vector<PreferenceTriple> triples;
    std::vector<AugmentedPair> pairs;
    std::vector<BenchmarkEntry> bench;
    std::vector<GenerationRecord> gens;
    std::vector<Verdict> verdicts;
    std::vector<PromptRecord> prompts;
    std::vector<ReferenceGeneration> refs;
    for (int i = 0; i < 15; ++i) {
      const std::string id = "id-" + std::to_string(i) + random_string(rng);
      triples.push_back({id, random_string(rng), random_string(rng), random_string(rng)});
      const bool flipped = i % 4 == 1;
      pairs.push_back({id, random_string(rng), static_cast<std::size_t>(i + 1), random_string(rng),
                       random_string(rng), flipped, static_cast<CaseTag>(i % 4)});
      const std::string baseline = random_string(rng);
      const std::size_t target = count_words(baseline) + static_cast<std::size_t>(i % 3) + 1;
      bench.push_back({id, random_string(rng), random_string(rng), target,
                       i % 5 == 0 ? std::nullopt
                                  : std::optional<Baseline>(Baseline{baseline, random_string(rng)})});
      const std::string response = random_string(rng, true);
      if (i % 6 == 0) {
        gens.push_back({id, "m", "", 0, true, "HTTP 500: " + random_string(rng)});
      } else {
        gens.push_back({id, "m", response, count_words(response), i % 2 == 0, std::nullopt});
      }
      Verdict v;
      v.entry_id = id;
      v.gated = i % 3 == 0;
      v.outcome = v.gated ? Outcome::kBaselineWin : static_cast<Outcome>(i % 3);
      if (!v.gated) v.judge_raw.push_back(Json{{"reply", random_string(rng)}});
      if (i % 7 == 3) v.error = "timeout";
      verdicts.push_back(v);
      prompts.push_back({id, random_string(rng)});
      refs.push_back({id, "ref" + std::to_string(i % 3), random_string(rng)});
    }
    expect_round_trip(triples);
    expect_round_trip(pairs);
    expect_round_trip(bench);
    expect_round_trip(gens);
    expect_round_trip(verdicts);
    expect_round_trip(prompts);
    expect_round_trip(refs);
  }
}

TEST(RoundTrip, Summary) {
  std::vector<EvalSummary> summaries = {{10, 20.0, 35.0, 150.5, 1.0, 0},
                                        {4, 100.0, std::nullopt, 12.0, 0.5, 2}};
  expect_round_trip(summaries);
  EXPECT_EQ(canonical_dump(to_json(summaries[1])),
            R"({"n":4,"violation_rate":100.0,"win_rate":null,"mean_words":12.0,"scale":0.5,"failures":2})");
}

TEST(Validation, RecordInvariants) {
  auto parse_one = [](const std::string& line, auto tag) {
    std::istringstream in(line + "\n");
    return parse_jsonl<decltype(tag)>(in);
  };
  EXPECT_THROW(parse_one(R"({"source_id":"a","li_prompt":"x","max_len":3,"winner":"w","loser":"l","flipped":true,"case_tag":"longer-chosen/slack"})",
                         AugmentedPair{}),
               ValidationError);
  EXPECT_THROW(parse_one(R"({"source_id":"a","li_prompt":"x","max_len":0,"winner":"w","loser":"l","flipped":false,"case_tag":"longer-chosen/slack"})",
                         AugmentedPair{}),
               ValidationError);
  EXPECT_THROW(parse_one(R"({"id":"a","original_prompt":"o","li_prompt":"l","target_len":1,"baseline_response":"two words","baseline_source":"m"})",
                         BenchmarkEntry{}),
               ValidationError);
  EXPECT_THROW(parse_one(R"({"id":"a","original_prompt":"o","li_prompt":"l","target_len":1,"baseline_response":"w","baseline_source":null})",
                         BenchmarkEntry{}),
               ValidationError);
  EXPECT_THROW(parse_one(R"({"entry_id":"a","model_label":"m","response":"one two","word_count":3,"violation":false})",
                         GenerationRecord{}),
               ValidationError);
  EXPECT_THROW(parse_one(R"({"entry_id":"a","outcome":"tie","gated":true,"judge_raw":[]})", Verdict{}),
               ValidationError);
  EXPECT_THROW(parse_one(R"({"entry_id":"a","model_label":"m","response":"x","word_count":-1,"violation":false})",
                         GenerationRecord{}),
               ValidationError);
}

}  // namespace
}  // namespace lenlift
