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

// lenlift: length-instruction data, benchmarks and evaluation.
//
// Exit status: 0 success, 1 usage/validation/configuration error,
// 2 transport error.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lenlift/benchbuild.hpp"
#include "lenlift/detail/sha256.hpp"
#include "lenlift/evalmetrics.hpp"
#include "lenlift/genclient.hpp"
#include "lenlift/jsonl.hpp"
#include "lenlift/judge.hpp"
#include "lenlift/lift.hpp"
#include "lenlift/report.hpp"
#include "lenlift/wordcount.hpp"

#ifndef LENLIFT_VERSION
#define LENLIFT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace lenlift;

namespace {

// JSON config files. Scalars and arrays at the top level apply to the global
// option of that name, or else to the option of the selected subcommand.
// Objects are per-subcommand sections, e.g. {"augment": {"seed": 7}}.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    const auto active = root_->get_subcommands();
    for (const auto& [key, value] : doc.items()) {
      if (value.is_object()) {
        for (const auto& [sub_key, sub_value] : value.items()) {
          items.push_back(item({key}, sub_key, sub_value));
        }
        continue;
      }
      std::vector<std::string> parents;
      if (root_->get_option_no_throw("--" + key) == nullptr) {
        for (const auto* sub : active) {
          if (sub->get_option_no_throw("--" + key) != nullptr) parents = {sub->get_name()};
        }
      }
      items.push_back(item(parents, key, value));
    }
    return items;
  }

 private:
  static std::string scalar(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config key " + key + " must be a string, number, boolean or array of those");
  }

  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& key, const Json& v) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = key;
    if (v.is_array()) {
      for (const auto& x : v) it.inputs.push_back(scalar(x, key));
    } else {
      it.inputs.push_back(scalar(v, key));
    }
    return it;
  }

  const CLI::App* root_;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reproducibility record written next to each output.
class RunManifest {
 public:
  RunManifest(int argc, char** argv) : started_(utc_now()) {
    for (int i = 0; i < argc; ++i) command_.push_back(argv[i]);
  }

  void add_input(const fs::path& p) {
    if (!p.empty()) inputs_[p.string()] = detail::sha256_file(p);
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_config(Json cfg) { config_ = std::move(cfg); }

  void write(const fs::path& path) const {
    Json doc{{"command", command_},
             {"config", config_},
             {"inputs", inputs_},
             {"seed", seed_ ? Json(*seed_) : Json(nullptr)},
             {"version", LENLIFT_VERSION},
             {"started_at", started_},
             {"finished_at", utc_now()}};
    write_file_atomic(path, doc.dump(2) + "\n");
  }

 private:
  std::vector<std::string> command_;
  Json config_ = Json::object();
  Json inputs_ = Json::object();
  std::optional<std::uint64_t> seed_;
  std::string started_;
};

fs::path manifest_path_for(const fs::path& out) {
  auto p = out;
  p += ".manifest.json";
  return p;
}

// Every option value as the run saw it, defaults included.
Json resolved_options(const CLI::App& app) {
  Json j = Json::object();
  for (const auto* opt : app.get_options()) {
    const auto name = opt->get_single_name();
    if (name == "help" || name == "version" || name == "config" || name.empty()) continue;
    const auto& res = opt->results();
    if (!res.empty()) {
      j[name] = res.size() == 1 ? Json(res[0]) : Json(res);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    } else {
      j[name] = nullptr;
    }
  }
  return j;
}

struct Globals {
  fs::path cache_dir = ".lenlift-cache";
  std::size_t concurrency = 4;
};

struct EndpointFlags {
  std::string url;
  std::string model;
  std::string key_env;
  double temperature;
  double top_p = 0.9;
  std::size_t max_tokens = 2048;
  double timeout_s = 120;
  unsigned max_retries = 3;

  explicit EndpointFlags(double default_temperature) : temperature(default_temperature) {}

  void add(CLI::App* sub, const std::string& prefix, const std::string& what) {
    sub->add_option("--" + prefix + "url", url, what + " base URL (chat-completions compatible)");
    sub->add_option("--" + prefix + "model", model, what + " model name");
    sub->add_option("--" + prefix + "key-env", key_env, "Environment variable holding the " + what + " API key");
    sub->add_option("--" + prefix + "temperature", temperature, what + " sampling temperature");
    sub->add_option("--" + prefix + "top-p", top_p, what + " nucleus sampling top_p");
    sub->add_option("--" + prefix + "max-tokens", max_tokens, what + " max tokens per reply");
    sub->add_option("--" + prefix + "timeout", timeout_s, what + " request timeout in seconds");
    sub->add_option("--" + prefix + "max-retries", max_retries, what + " retries on 429/5xx/network errors");
  }

  EndpointConfig config() const {
    EndpointConfig c;
    c.base_url = url;
    c.model_name = model;
    c.api_key_env = key_env;
    c.temperature = temperature;
    c.top_p = top_p;
    c.max_tokens = max_tokens;
    c.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
    c.max_retries = max_retries;
    c.validate();
    return c;
  }
};

struct JudgeFlags {
  EndpointFlags endpoint{0.0};
  bool single_order = false;
  std::string tie_policy = "half_win";
  std::string mock_rule;
  std::uint64_t mock_seed = 0;
  fs::path template_file;

  void add(CLI::App* sub) {
    endpoint.add(sub, "judge-", "Judge");
    sub->add_flag("--single-order", single_order, "Judge each pair once instead of in both orders");
    sub->add_option("--tie-policy", tie_policy, "How ties enter the win rate")
        ->check(CLI::IsMember({"half_win", "drop"}));
    sub->add_option("--mock-judge", mock_rule,
                    "Offline deterministic judge: prefer-longer, prefer-shorter, prefer-lexicographic, "
                    "first, second, tie, hashed");
    sub->add_option("--mock-seed", mock_seed, "Seed for --mock-judge hashed");
    sub->add_option("--judge-template", template_file,
                    "File with the judge prompt; placeholders {instruction} {response_a} {response_b}")
        ->check(CLI::ExistingFile);
  }

  bool configured() const { return !mock_rule.empty() || !endpoint.url.empty(); }

  TiePolicy policy() const { return *parse_tie_policy(tie_policy); }

  // Owns whatever backs the judge.
  struct Built {
    std::unique_ptr<ChatClient> client;
    std::unique_ptr<Judge> judge;
  };

  Built build(const Globals& g) const {
    Built b;
    if (!mock_rule.empty()) {
      const auto rule = parse_mock_rule(mock_rule);
      if (!rule) throw ConfigError("unknown mock judge rule: " + mock_rule);
      b.judge = std::make_unique<MockJudge>(*rule, mock_seed);
      return b;
    }
    if (endpoint.url.empty()) throw ConfigError("judging needs --judge-url and --judge-model (or --mock-judge)");
    b.client = std::make_unique<ChatClient>(endpoint.config(), g.cache_dir);
    LlmJudgeConfig cfg;
    if (!template_file.empty()) {
      std::ifstream in(template_file, std::ios::binary);
      cfg.prompt_template.assign(std::istreambuf_iterator<char>(in), {});
    }
    b.judge = std::make_unique<LlmJudge>(*b.client, cfg);
    return b;
  }
};

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

// Entries that will reach the judge: a baseline exists and the generation
// is within the limit.
bool needs_judge(std::span<const BenchmarkEntry> bench, std::span<const GenerationRecord> gens) {
  std::map<std::string_view, const GenerationRecord*> by_id;
  for (const auto& g : gens) by_id.emplace(g.entry_id, &g);
  for (const auto& e : bench) {
    auto it = by_id.find(e.id);
    if (e.baseline && it != by_id.end() && !it->second->violation) return true;
  }
  return false;
}

std::vector<double> parse_factors(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      try {
        std::size_t used = 0;
        out.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::logic_error&) {
        throw ConfigError("not a scale factor: " + part);
      }
    }
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Length-instruction data augmentation, benchmarks and evaluation", "lenlift"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", LENLIFT_VERSION);
  app.set_config("--config", "", "JSON config file; keys mirror flag names (flags > config > env > defaults)");
  app.config_formatter(std::make_shared<JsonConfig>(&app));

  Globals g;
  app.add_option("--cache-dir", g.cache_dir, "Response cache directory")->envname("LENLIFT_CACHE_DIR");
  app.add_option("--concurrency", g.concurrency, "Concurrent model requests")
      ->envname("LENLIFT_CONCURRENCY")
      ->check(CLI::PositiveNumber);

  RunManifest manifest(argc, argv);

  // count
  auto* count = app.add_subcommand("count", "Print the word count of a text");
  std::string count_text;
  fs::path count_file, count_manifest;
  auto* text_opt = count->add_option("--text", count_text, "Text to count");
  count->add_option("--file", count_file, "Read the text from a file")->check(CLI::ExistingFile)->excludes(text_opt);
  count->add_option("--manifest", count_manifest, "Write a run manifest to this path");

  // augment
  auto* augment = app.add_subcommand("augment", "Add length-instructed pairs to a preference dataset");
  fs::path aug_in, aug_out, aug_union;
  LiftConfig lift_cfg;
  augment->add_option("--in", aug_in, "Preference triples JSONL")->required()->check(CLI::ExistingFile);
  augment->add_option("--out", aug_out, "Augmented pairs JSONL")->required();
  augment->add_option("--threshold", lift_cfg.threshold, "Minimum word-count gap between chosen and rejected");
  augment->add_option("--seed", lift_cfg.seed, "Sampling seed")->required()->default_str("");
  augment->add_option("--emit-union", aug_union, "Also write original plus augmented pairs as triples");

  // build-bench
  auto* build = app.add_subcommand("build-bench", "Build a length-instructed benchmark");
  fs::path bb_prompts, bb_refs, bb_exclude, bb_out;
  bool bb_auto = false;
  std::size_t bb_multi = 0;
  build->add_option("--prompts", bb_prompts, "Prompts JSONL {id, prompt}")->required()->check(CLI::ExistingFile);
  build->add_option("--refs", bb_refs, "Reference generations JSONL {prompt_id, model_label, response}")
      ->required()
      ->check(CLI::ExistingFile);
  auto* excl = build->add_option("--exclude", bb_exclude, "File of prompt ids to drop, one per line")
                   ->check(CLI::ExistingFile);
  build->add_flag("--auto-exclude", bb_auto, "Drop prompts that already state a length limit")->excludes(excl);
  build->add_option("--multi", bb_multi, "Emit k entries per prompt from the k shortest references (0: off)");
  build->add_option("--out", bb_out, "Benchmark JSONL")->required();

  // scale-bench
  auto* scale = app.add_subcommand("scale-bench", "Scale every target length of a benchmark");
  fs::path sb_in, sb_out;
  double sb_factor = 1.0;
  scale->add_option("--in", sb_in, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  scale->add_option("--factor", sb_factor, "Scale factor in (0, 1]")->required();
  scale->add_option("--out", sb_out, "Scaled benchmark JSONL")->required();

  // generate
  auto* generate = app.add_subcommand("generate", "Query a model on every benchmark entry");
  fs::path gen_bench, gen_out;
  std::string gen_label;
  EndpointFlags gen_endpoint{0.7};
  generate->add_option("--bench", gen_bench, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", gen_out, "Generations JSONL")->required();
  generate->add_option("--label", gen_label, "Model label in the records (default: model name)");
  gen_endpoint.add(generate, "", "Model");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Gate, judge and summarize a set of generations");
  fs::path ev_bench, ev_gens, ev_out, ev_summary;
  JudgeFlags ev_judge;
  evaluate->add_option("--bench", ev_bench, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--gens", ev_gens, "Generations JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev_out, "Verdicts JSONL")->required();
  evaluate->add_option("--summary", ev_summary, "Also write the summary JSON here");
  ev_judge.add(evaluate);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Generate and evaluate at a series of scale factors");
  fs::path sw_bench, sw_out;
  std::vector<std::string> sw_factors_raw{"0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1"};
  std::string sw_series;
  EndpointFlags sw_endpoint{0.7};
  JudgeFlags sw_judge;
  sweep->add_option("--bench", sw_bench, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  sweep->add_option("--factors", sw_factors_raw, "Strictly decreasing scale factors, comma separated");
  sweep->add_option("--series", sw_series, "Series name (default: model name)");
  sweep->add_option("--out", sw_out, "Sweep result JSON")->required();
  sw_endpoint.add(sweep, "", "Model");
  sw_judge.add(sweep);

  // report
  auto* report = app.add_subcommand("report", "Write CSV tables and SVG charts");
  fs::path rp_bench, rp_gens, rp_verdicts, rp_out;
  std::vector<fs::path> rp_sweeps;
  std::string rp_tie = "half_win";
  report->add_option("--bench", rp_bench, "Benchmark JSONL")->required()->check(CLI::ExistingFile);
  report->add_option("--gens", rp_gens, "Generations JSONL")->required()->check(CLI::ExistingFile);
  report->add_option("--verdicts", rp_verdicts, "Verdicts JSONL")->check(CLI::ExistingFile);
  report->add_option("--sweep", rp_sweeps, "Sweep result JSON files (one series each)")->check(CLI::ExistingFile);
  report->add_option("--tie-policy", rp_tie, "How ties enter the win rate")->check(CLI::IsMember({"half_win", "drop"}));
  report->add_option("--out-dir", rp_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto record_config = [&](const CLI::App* sub) {
    Json cfg = resolved_options(app);
    cfg[sub->get_name()] = resolved_options(*sub);
    manifest.set_config(std::move(cfg));
  };

  if (*count) {
    record_config(count);
    std::string text = count_text;
    if (!count_file.empty()) {
      std::ifstream in(count_file, std::ios::binary);
      text.assign(std::istreambuf_iterator<char>(in), {});
      manifest.add_input(count_file);
    }
    std::cout << count_words(text) << "\n";
    if (!count_manifest.empty()) manifest.write(count_manifest);
    return 0;
  }

  if (*augment) {
    record_config(augment);
    lift_cfg.validate();
    const auto triples = load_triples(aug_in);
    manifest.add_input(aug_in);
    manifest.set_seed(lift_cfg.seed);
    const auto result = augment_dataset(triples, lift_cfg);
    write_jsonl(result.pairs, aug_out);
    if (!aug_union.empty()) write_jsonl(training_union(triples, result.pairs), aug_union);
    manifest.write(manifest_path_for(aug_out));
    print_json(result.stats.to_json());
    return 0;
  }

  if (*build) {
    record_config(build);
    const auto prompts = to_prompt_map(load_jsonl<PromptRecord>(bb_prompts));
    const auto refs = load_jsonl<ReferenceGeneration>(bb_refs);
    manifest.add_input(bb_prompts);
    manifest.add_input(bb_refs);
    IdSet exclusions;
    if (!bb_exclude.empty()) {
      exclusions = load_id_list(bb_exclude);
      manifest.add_input(bb_exclude);
    } else if (bb_auto) {
      exclusions = auto_exclusions(prompts);
    }
    const auto bench = bb_multi > 0 ? build_multi_constraint(prompts, refs, bb_multi, exclusions)
                                    : build_benchmark(prompts, refs, exclusions);
    write_jsonl(bench, bb_out);
    manifest.write(manifest_path_for(bb_out));
    print_json(Json{{"prompts", prompts.size()}, {"excluded", exclusions.size()}, {"entries", bench.size()}});
    return 0;
  }

  if (*scale) {
    record_config(scale);
    const auto bench = load_jsonl<BenchmarkEntry>(sb_in);
    manifest.add_input(sb_in);
    const auto scaled = scale_benchmark(bench, sb_factor);
    write_jsonl(scaled, sb_out);
    manifest.write(manifest_path_for(sb_out));
    std::size_t without = 0;
    for (const auto& e : scaled) without += e.baseline ? 0 : 1;
    print_json(Json{{"entries", scaled.size()}, {"without_baseline", without}});
    return 0;
  }

  if (*generate) {
    record_config(generate);
    const auto bench = load_jsonl<BenchmarkEntry>(gen_bench);
    manifest.add_input(gen_bench);
    ChatClient client(gen_endpoint.config(), g.cache_dir);
    const auto gens = generate_over_benchmark(client, bench, g.concurrency, gen_label);
    write_jsonl(gens, gen_out);
    manifest.write(manifest_path_for(gen_out));
    print_json(Json{{"entries", gens.size()},
                    {"failures", failure_count(gens)},
                    {"network_calls", client.network_calls()},
                    {"cache_hits", client.cache_hits()}});
    return 0;
  }

  if (*evaluate) {
    record_config(evaluate);
    const auto bench = load_jsonl<BenchmarkEntry>(ev_bench);
    const auto gens = load_jsonl<GenerationRecord>(ev_gens);
    manifest.add_input(ev_bench);
    manifest.add_input(ev_gens);
    std::vector<Verdict> verdicts;
    if (needs_judge(bench, gens) || ev_judge.configured()) {
      if (!ev_judge.configured()) {
        throw ConfigError("benchmark entries need judging: pass --judge-url and --judge-model, or --mock-judge");
      }
      auto built = ev_judge.build(g);
      verdicts = judge_benchmark(bench, gens, *built.judge, JudgeOptions{!ev_judge.single_order}, g.concurrency);
    }
    write_jsonl(verdicts, ev_out);
    const auto summary = summarize(bench, gens, verdicts, ev_judge.policy());
    if (!ev_summary.empty()) write_json(to_json(summary), ev_summary);
    manifest.write(manifest_path_for(ev_out));
    print_json(to_json(summary));
    return 0;
  }

  if (*sweep) {
    record_config(sweep);
    const auto bench = load_jsonl<BenchmarkEntry>(sw_bench);
    manifest.add_input(sw_bench);
    ScaleSpec spec{parse_factors(sw_factors_raw)};
    spec.validate();
    ChatClient client(sw_endpoint.config(), g.cache_dir);
    std::optional<SweepJudge> judge;
    JudgeFlags::Built built;
    if (sw_judge.configured()) {
      built = sw_judge.build(g);
      judge = SweepJudge{built.judge.get(), JudgeOptions{!sw_judge.single_order}, sw_judge.policy(), g.concurrency};
    }
    const auto label = sw_series.empty() ? client.config().model_name : sw_series;
    const auto result = run_sweep(
        bench, spec,
        [&](std::span<const BenchmarkEntry> b) { return generate_over_benchmark(client, b, g.concurrency, label); },
        judge, label);
    write_json(result.to_json(), sw_out);
    manifest.write(manifest_path_for(sw_out));
    print_json(result.to_json());
    return 0;
  }

  if (*report) {
    record_config(report);
    const auto bench = load_jsonl<BenchmarkEntry>(rp_bench);
    const auto gens = load_jsonl<GenerationRecord>(rp_gens);
    manifest.add_input(rp_bench);
    manifest.add_input(rp_gens);
    std::vector<Verdict> verdicts;
    if (!rp_verdicts.empty()) {
      verdicts = load_jsonl<Verdict>(rp_verdicts);
      manifest.add_input(rp_verdicts);
    }
    std::vector<SweepResult> sweeps;
    for (const auto& p : rp_sweeps) {
      sweeps.push_back(SweepResult::from_json(load_json(p)));
      manifest.add_input(p);
    }
    const auto written = write_report(rp_out, bench, gens, verdicts, sweeps, *parse_tie_policy(rp_tie));
    manifest.write(rp_out / "manifest.json");
    for (const auto& p : written.written) std::cout << p.string() << "\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const TransportError& e) {
    std::cerr << "lenlift: transport error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lenlift: " << e.what() << "\n";
    return 1;
  }
}
