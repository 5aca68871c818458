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

#include "lenlift/judge.hpp"

#include <gtest/gtest.h>

#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "lenlift/lift.hpp"

namespace lenlift {
namespace {

std::string words(std::size_t n, std::string_view stem = "w") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += stem;
  }
  return s;
}

BenchmarkEntry entry_with_baseline(std::size_t target, std::string baseline) {
  return BenchmarkEntry{"e1", "Tell me about Coco Gauff", render_template("Tell me about Coco Gauff", target),
                        target, Baseline{std::move(baseline), "ref"}};
}

GenerationRecord gen_for(const BenchmarkEntry& e, std::string response) {
  return make_generation(e, "cand", std::move(response));
}

TEST(ParsePreference, Examples) {
  std::atomic<std::size_t> unparsed{0};
  EXPECT_EQ(parse_preference("Output: B", &unparsed), Preference::kSecond);
  EXPECT_EQ(parse_preference("A", &unparsed), Preference::kFirst);
  EXPECT_EQ(parse_preference("m", &unparsed), Preference::kFirst);
  EXPECT_EQ(parse_preference("M", &unparsed), Preference::kSecond);
  EXPECT_EQ(parse_preference("  \"B\".\n", &unparsed), Preference::kSecond);
  EXPECT_EQ(parse_preference("**A**", &unparsed), Preference::kFirst);
  EXPECT_EQ(parse_preference("Output: (m)", &unparsed), Preference::kFirst);
  EXPECT_EQ(parse_preference("After weighing both, Verdict: B", &unparsed), Preference::kSecond);
  EXPECT_EQ(parse_preference("I think Response A is better overall.", &unparsed), Preference::kFirst);
  EXPECT_EQ(parse_preference("tie", &unparsed), Preference::kTie);
  EXPECT_EQ(unparsed.load(), 0u);
  EXPECT_EQ(parse_preference("%%garbled%%", &unparsed), Preference::kTie);
  EXPECT_EQ(parse_preference("Answer: a good response needs detail", &unparsed), Preference::kTie);
  EXPECT_EQ(parse_preference("", &unparsed), Preference::kTie);
  EXPECT_EQ(unparsed.load(), 3u);
}

TEST(JudgeTemplate, SubstitutesOnce) {
  EXPECT_EQ(render_judge_prompt("[{instruction}|{response_a}|{response_b}]", "I {response_b}", "x", "y"),
            "[I {response_b}|x|y]");
  EXPECT_NO_THROW(validate_judge_template(kDefaultJudgeTemplate));
  EXPECT_THROW(validate_judge_template("{instruction} {response_a}"), ConfigError);
}

TEST(MockJudge, Rules) {
  MockJudge longer(MockRule::kPreferLonger);
  EXPECT_EQ(longer.compare("q", words(120), words(80)).preferred, Preference::kFirst);
  EXPECT_EQ(longer.compare("q", words(80), words(120)).preferred, Preference::kSecond);
  MockJudge lex(MockRule::kPreferLexicographic);
  EXPECT_EQ(lex.compare("q", "same", "same").preferred, Preference::kTie);
  EXPECT_EQ(lex.compare("q", "apple", "banana").preferred, Preference::kFirst);
  MockJudge hashed(MockRule::kHashed, 5);
  EXPECT_EQ(hashed.compare("q", "a", "b").preferred, hashed.compare("q", "a", "b").preferred);
  EXPECT_EQ(hashed.calls(), 2u);
  EXPECT_EQ(parse_mock_rule("prefer-longer"), MockRule::kPreferLonger);
  EXPECT_FALSE(parse_mock_rule("nonsense"));
}

TEST(GateAndJudge, ViolationLosesWithoutJudgeCall) {
  const auto e = entry_with_baseline(210, words(200));
  MockJudge judge(MockRule::kFirst);
  const auto v = gate_and_judge(e, gen_for(e, words(250)), judge);
  EXPECT_EQ(v.outcome, Outcome::kBaselineWin);
  EXPECT_TRUE(v.gated);
  EXPECT_TRUE(v.judge_raw.empty());
  EXPECT_EQ(judge.calls(), 0u);
}

TEST(GateAndJudge, LimitIsInclusive) {
  const auto e = entry_with_baseline(210, words(200));
  MockJudge judge(MockRule::kPreferLonger);
  const auto v = gate_and_judge(e, gen_for(e, words(210)), judge);
  EXPECT_FALSE(v.gated);
  EXPECT_EQ(v.outcome, Outcome::kCandidateWin);
  EXPECT_EQ(judge.calls(), 2u);
}

TEST(GateAndJudge, AgreementAndSplit) {
  const auto e = entry_with_baseline(100, words(50));
  MockJudge longer(MockRule::kPreferLonger);
  EXPECT_EQ(gate_and_judge(e, gen_for(e, words(90)), longer).outcome, Outcome::kCandidateWin);
  MockJudge shorter(MockRule::kPreferShorter);
  EXPECT_EQ(gate_and_judge(e, gen_for(e, words(90)), shorter).outcome, Outcome::kBaselineWin);
  // Always-first judges split across orders.
  MockJudge first(MockRule::kFirst);
  EXPECT_EQ(gate_and_judge(e, gen_for(e, words(90)), first).outcome, Outcome::kTie);
  // Single order trusts the one reply.
  MockJudge first_once(MockRule::kFirst);
  const auto v = gate_and_judge(e, gen_for(e, words(90)), first_once, JudgeOptions{false});
  EXPECT_EQ(v.outcome, Outcome::kCandidateWin);
  EXPECT_EQ(first_once.calls(), 1u);
  EXPECT_EQ(v.judge_raw.size(), 1u);
}

TEST(GateAndJudge, JudgeSeesOriginalPromptOnly) {
  const auto e = entry_with_baseline(100, words(50));
  std::vector<std::string> seen;
  std::mutex mu;
  EndpointConfig cfg;
  cfg.base_url = "http://judge.test";
  cfg.model_name = "judge";
  ChatClient client(
      cfg, std::nullopt,
      [&](const HttpRequest& req) {
        std::lock_guard lock(mu);
        seen.push_back(req.body);
        return HttpResponse{200,
                            R"({"choices":[{"message":{"role":"assistant","content":"Output: A"}}]})", ""};
      },
      [](std::chrono::milliseconds) {});
  LlmJudge judge(client);
  gate_and_judge(e, gen_for(e, words(60, "c")), judge);
  ASSERT_EQ(seen.size(), 2u);
  for (const auto& body : seen) {
    const auto user = Json::parse(body)["messages"][1]["content"].get<std::string>();
    EXPECT_NE(user.find("Tell me about Coco Gauff"), std::string::npos);
    EXPECT_EQ(user.find("words or less"), std::string::npos);
    EXPECT_EQ(user.find("Answer the following instruction"), std::string::npos);
  }
}

TEST(GateAndJudge, TransportErrorRecorded) {
  const auto e = entry_with_baseline(100, words(50));
  MockJudge failing([](std::string_view, std::string_view) -> Preference {
    throw TransportError("judge down", 503, true);
  });
  const auto v = gate_and_judge(e, gen_for(e, words(60)), failing);
  EXPECT_TRUE(v.failed());
  EXPECT_EQ(v.outcome, Outcome::kTie);
  EXPECT_FALSE(v.gated);
}

TEST(GateAndJudge, PreconditionsChecked) {
  auto e = entry_with_baseline(100, words(50));
  MockJudge judge(MockRule::kTie);
  auto g = gen_for(e, words(10));
  g.entry_id = "other";
  EXPECT_THROW(gate_and_judge(e, g, judge), ValidationError);
  e.baseline.reset();
  EXPECT_THROW(gate_and_judge(e, gen_for(e, words(10)), judge), ValidationError);
}

// Random deterministic preference tables, including adversarial ones that
// always favour the candidate.
MockJudge random_judge(std::mt19937_64& rng) {
  const std::uint64_t salt = rng();
  const int mode = static_cast<int>(rng() % 4);
  return MockJudge([salt, mode](std::string_view a, std::string_view b) {
    if (mode == 0) return Preference::kFirst;
    if (mode == 1) return Preference::kSecond;
    std::uint64_t h = salt;
    for (unsigned char c : a) h = (h ^ c) * 0x100000001B3ULL;
    for (unsigned char c : b) h = (h ^ c) * 0x100000001B3ULL;
    return mode == 2 ? static_cast<Preference>(h % 3) : (a.size() >= b.size() ? Preference::kFirst : Preference::kSecond);
  });
}

TEST(GateAndJudge, GateDominanceFuzz) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    auto judge = random_judge(rng);
    const std::size_t target = 1 + rng() % 60;
    const auto e = entry_with_baseline(target, words(1 + rng() % target));
    const auto g = gen_for(e, words(target + 1 + rng() % 40));
    const auto v = gate_and_judge(e, g, judge, JudgeOptions{rng() % 2 == 0});
    EXPECT_EQ(v.outcome, Outcome::kBaselineWin);
    EXPECT_TRUE(v.gated);
    EXPECT_EQ(judge.calls(), 0u);
  }
}

TEST(GateAndJudge, BothOrdersSymmetry) {
  std::mt19937_64 rng(77);
  auto flip = [](Outcome o) {
    return o == Outcome::kCandidateWin ? Outcome::kBaselineWin
           : o == Outcome::kBaselineWin ? Outcome::kCandidateWin
                                        : Outcome::kTie;
  };
  for (int i = 0; i < 300; ++i) {
    auto judge = random_judge(rng);
    const std::string x = words(1 + rng() % 20, "x");
    const std::string y = words(1 + rng() % 20, "y");
    const auto e1 = entry_with_baseline(50, y);
    const auto e2 = entry_with_baseline(50, x);
    const auto v1 = gate_and_judge(e1, gen_for(e1, x), judge);
    const auto v2 = gate_and_judge(e2, gen_for(e2, y), judge);
    EXPECT_EQ(v1.outcome, flip(v2.outcome));
  }
}

TEST(JudgeBenchmark, SkipsBaselineLessAndOrdersById) {
  std::vector<BenchmarkEntry> bench;
  for (const char* id : {"c", "a", "b"}) {
    bench.push_back(BenchmarkEntry{id, "q", render_template("q", 10), 10, Baseline{words(5), "r"}});
  }
  bench[2].baseline.reset();  // "b"
  std::vector<GenerationRecord> gens;
  for (const auto& e : bench) gens.push_back(make_generation(e, "m", words(e.id == "a" ? 20 : 8)));
  MockJudge judge(MockRule::kPreferLonger);
  const auto verdicts = judge_benchmark(bench, gens, judge, {}, 3);
  ASSERT_EQ(verdicts.size(), 2u);
  EXPECT_EQ(verdicts[0].entry_id, "a");
  EXPECT_TRUE(verdicts[0].gated);
  EXPECT_EQ(verdicts[1].entry_id, "c");
  EXPECT_EQ(verdicts[1].outcome, Outcome::kCandidateWin);

  gens.push_back(gens.front());
  EXPECT_THROW(judge_benchmark(bench, gens, judge, {}, 1), ValidationError);
}

}  // namespace
}  // namespace lenlift
