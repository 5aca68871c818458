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

#include "lenlift/benchbuild.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

namespace lenlift {
namespace {

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

TEST(BuildBenchmark, MinimumOfThree) {
  const PromptMap prompts = {{"p1", "Tell me about Coco Gauff"}};
  const std::vector<ReferenceGeneration> refs = {
      {"p1", "ref-a", words(320)}, {"p1", "ref-b", words(210)}, {"p1", "ref-c", words(270)}};
  const auto bench = build_benchmark(prompts, refs);
  ASSERT_EQ(bench.size(), 1u);
  EXPECT_EQ(bench[0].target_len, 210u);
  ASSERT_TRUE(bench[0].baseline);
  EXPECT_EQ(bench[0].baseline->source, "ref-b");
  EXPECT_EQ(bench[0].baseline->response, words(210));
  EXPECT_EQ(bench[0].li_prompt, render_template("Tell me about Coco Gauff", 210));
  EXPECT_EQ(bench[0].original_prompt, "Tell me about Coco Gauff");
}

TEST(BuildBenchmark, SingleReference) {
  const PromptMap prompts = {{"p", "q"}};
  const std::vector<ReferenceGeneration> refs = {{"p", "only", words(42)}};
  const auto bench = build_benchmark(prompts, refs);
  EXPECT_EQ(bench[0].target_len, 42u);
  EXPECT_EQ(bench[0].baseline->source, "only");
}

TEST(BuildBenchmark, TieGoesToSmallestLabel) {
  const PromptMap prompts = {{"p", "q"}};
  const std::vector<ReferenceGeneration> refs = {{"p", "b", words(150)}, {"p", "a", words(150)}};
  EXPECT_EQ(build_benchmark(prompts, refs)[0].baseline->source, "a");
}

TEST(BuildBenchmark, OrderedByIdAndExclusionsApplied) {
  const PromptMap prompts = {{"c", "q"}, {"a", "q"}, {"b", "q"}};
  std::vector<ReferenceGeneration> refs;
  for (const char* id : {"c", "a"}) refs.push_back({id, "m", words(5)});
  const auto bench = build_benchmark(prompts, refs, {"b"});
  ASSERT_EQ(bench.size(), 2u);
  EXPECT_EQ(bench[0].id, "a");
  EXPECT_EQ(bench[1].id, "c");
}

TEST(BuildBenchmark, MissingReferencesListed) {
  const PromptMap prompts = {{"a", "q"}, {"b", "q"}, {"c", "q"}};
  const std::vector<ReferenceGeneration> refs = {{"b", "m", "x"}};
  try {
    build_benchmark(prompts, refs);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "prompts without reference generations: a, c");
  }
}

TEST(BuildBenchmark, UnknownAndDuplicateReferencesRejected) {
  const PromptMap prompts = {{"a", "q"}};
  const std::vector<ReferenceGeneration> unknown = {{"a", "m", "x"}, {"zz", "m", "x"}};
  EXPECT_THROW(build_benchmark(prompts, unknown), ValidationError);
  const std::vector<ReferenceGeneration> dup = {{"a", "m", "x"}, {"a", "m", "y z"}};
  EXPECT_THROW(build_benchmark(prompts, dup), ValidationError);
}

TEST(BuildBenchmark, ZeroWordReferenceGivesLimitOne) {
  const PromptMap prompts = {{"a", "q"}};
  const std::vector<ReferenceGeneration> refs = {{"a", "m", "!!!"}};
  EXPECT_EQ(build_benchmark(prompts, refs)[0].target_len, 1u);
}

TEST(BuildMultiConstraint, OneEntryPerReferenceLength) {
  const PromptMap prompts = {{"p", "q"}};
  const std::vector<ReferenceGeneration> refs = {
      {"p", "x", words(300)}, {"p", "y", words(100)}, {"p", "z", words(200)}};
  const auto bench = build_multi_constraint(prompts, refs, 3);
  ASSERT_EQ(bench.size(), 3u);
  EXPECT_EQ(bench[0].id, "p#c1");
  EXPECT_EQ(bench[0].target_len, 100u);
  EXPECT_EQ(bench[1].target_len, 200u);
  EXPECT_EQ(bench[2].target_len, 300u);
  EXPECT_EQ(bench[0].baseline->response, words(100));
  for (const auto& e : bench) {
    EXPECT_LE(count_words(e.baseline->response), e.target_len);
    EXPECT_EQ(e.baseline->source, "y");
  }
}

TEST(BuildMultiConstraint, KOneMatchesBuildBenchmark) {
  const PromptMap prompts = {{"a", "q1"}, {"b", "q2"}};
  const std::vector<ReferenceGeneration> refs = {
      {"a", "m1", words(7)}, {"a", "m2", words(3)}, {"b", "m1", words(9)}};
  auto multi = build_multi_constraint(prompts, refs, 1);
  const auto single = build_benchmark(prompts, refs);
  ASSERT_EQ(multi.size(), single.size());
  for (std::size_t i = 0; i < multi.size(); ++i) {
    EXPECT_EQ(multi[i].id, single[i].id + "#c1");
    multi[i].id = single[i].id;
    EXPECT_EQ(multi[i], single[i]);
  }
}

TEST(BuildMultiConstraint, TooFewReferences) {
  const PromptMap prompts = {{"a", "q"}};
  const std::vector<ReferenceGeneration> refs = {{"a", "m1", "x"}, {"a", "m2", "y"}};
  EXPECT_THROW(build_multi_constraint(prompts, refs, 3), ValidationError);
  EXPECT_THROW(build_multi_constraint(prompts, refs, 0), ConfigError);
}

TEST(ScaledTarget, RoundHalfUpWithFloorOne) {
  EXPECT_EQ(scaled_target(200, 0.1), 20u);
  EXPECT_EQ(scaled_target(15, 0.1), 2u);
  EXPECT_EQ(scaled_target(5, 0.1), 1u);  // 0.5 rounds up
  EXPECT_EQ(scaled_target(4, 0.1), 1u);  // 0.4 rounds to 0, floored at 1
  EXPECT_EQ(scaled_target(1, 0.1), 1u);
  EXPECT_EQ(scaled_target(25, 0.3), 8u);  // 7.5
  EXPECT_EQ(scaled_target(35, 0.7), 25u);  // 24.5
  for (std::size_t t = 1; t < 2000; ++t) EXPECT_EQ(scaled_target(t, 1.0), t);
}

TEST(ScaledTarget, MatchesExactRationalRounding) {
  // Factor k/10 applied to t is (k*t)/10 exactly; half-up is (k*t + 5) / 10.
  for (int k = 1; k <= 10; ++k) {
    for (std::size_t t = 1; t < 3000; ++t) {
      const std::size_t exact = std::max<std::size_t>(1, (k * t + 5) / 10);
      ASSERT_EQ(scaled_target(t, k / 10.0), exact) << t << " x " << k;
    }
  }
}

TEST(ScaledTarget, MonotoneInFactor) {
  const ScaleSpec spec;
  for (std::size_t t = 1; t < 1000; ++t) {
    std::size_t prev = t;
    for (double f : spec.factors) {
      const auto s = scaled_target(t, f);
      EXPECT_LE(s, prev);
      prev = s;
    }
  }
}

TEST(ScaleBenchmark, RerendersAndDropsStaleBaseline) {
  const PromptMap prompts = {{"a", "q"}};
  const std::vector<ReferenceGeneration> refs = {{"a", "m", words(40)}};
  const auto bench = build_benchmark(prompts, refs);
  const auto same = scale_benchmark(bench, 1.0);
  EXPECT_EQ(same, bench);
  const auto half = scale_benchmark(bench, 0.5);
  EXPECT_EQ(half[0].target_len, 20u);
  EXPECT_EQ(half[0].li_prompt, render_template("q", 20));
  EXPECT_FALSE(half[0].baseline);
  EXPECT_THROW(scale_benchmark(bench, 0.0), ConfigError);
  EXPECT_THROW(scale_benchmark(bench, 1.5), ConfigError);
}

TEST(ScaleSpec, Validation) {
  ScaleSpec spec;
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.factors.size(), 9u);
  spec.factors = {0.5, 0.5};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.factors = {};
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(DetectConstraint, Examples) {
  EXPECT_TRUE(detect_preexisting_constraint("Summarize this in 50 words or less: the text"));
  EXPECT_FALSE(detect_preexisting_constraint("Tell me about Coco Gauff"));
  for (const char* p : {"Write a poem in three sentences.", "Answer using no more than 100 words",
                        "Give a 200-word summary.", "Describe Paris in at most 2 paragraphs.",
                        "Write a tweet of less than 280 characters.", "Explain, 50 words max.",
                        "Keep it under 30 words please", "Respect the word limit."}) {
    EXPECT_TRUE(detect_preexisting_constraint(p)) << p;
  }
  for (const char* p : {"How many words are in the English language?",
                        "List 5 fruits that are red.", "What is 2 + 2?",
                        "Write a story about a dragon.", "Translate these sentences into French."}) {
    EXPECT_FALSE(detect_preexisting_constraint(p)) << p;
  }
}

TEST(DetectConstraint, AutoExclusions) {
  const PromptMap prompts = {{"a", "Write in 10 words."}, {"b", "Hi"}};
  EXPECT_EQ(auto_exclusions(prompts), IdSet{"a"});
}

TEST(BuildBenchmark, BaselineAlwaysFitsRandomized) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> len(0, 300);
  PromptMap prompts;
  std::vector<ReferenceGeneration> refs;
  for (int i = 0; i < 200; ++i) {
    const auto id = row_id(static_cast<std::size_t>(i));
    prompts[id] = "prompt " + std::to_string(i);
    for (const char* m : {"a", "b", "c"}) refs.push_back({id, m, "x " + words(len(rng))});
  }
  const auto bench = build_benchmark(prompts, refs);
  ASSERT_EQ(bench.size(), 200u);
  for (const auto& e : bench) {
    EXPECT_GE(e.target_len, 1u);
    EXPECT_LE(count_words(e.baseline->response), e.target_len);
    for (const auto& r : refs) {
      if (r.prompt_id == e.id) {
        EXPECT_LE(e.target_len, std::max<std::size_t>(1, count_words(r.response)));
      }
    }
  }
  for (double f : ScaleSpec{}.factors) {
    for (const auto& e : scale_benchmark(bench, f)) {
      if (e.baseline) {
        EXPECT_LE(count_words(e.baseline->response), e.target_len);
      }
    }
  }
}

}  // namespace
}  // namespace lenlift
