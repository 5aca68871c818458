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

// Chat-completions client with retries and a content-addressed response
// cache.
//
// Request body, in this key order:
//   {"model":..., "messages":[{"role":...,"content":...}], "temperature":...,
//    "top_p":..., "max_tokens":...}
// The cache key is SHA-256 over base_url, NUL, model, NUL, body bytes, and
// entries live at <cache_dir>/<first two hex digits>/<digest>.json.

#ifndef LENLIFT_GENCLIENT_HPP_
#define LENLIFT_GENCLIENT_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "lenlift/detail/parallel.hpp"
#include "lenlift/detail/sha256.hpp"
#include "lenlift/error.hpp"
#include "lenlift/jsonl.hpp"
#include "lenlift/records.hpp"
#include "lenlift/wordcount.hpp"

namespace lenlift {

inline constexpr unsigned kMaxRetriesLimit = 10;

struct ChatMessage {
  std::string role;
  std::string content;
};

struct EndpointConfig {
  std::string base_url;     // e.g. https://api.example.com/v1
  std::string model_name;
  std::string api_key_env;  // empty: unauthenticated endpoint
  double temperature = 0.7;
  double top_p = 0.9;
  std::size_t max_tokens = 2048;
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  unsigned max_retries = 3;
  std::chrono::milliseconds backoff{500};  // first retry delay, doubled per retry

  void validate() const {
    if (base_url.empty()) throw ConfigError("endpoint base URL is empty");
    if (model_name.empty()) throw ConfigError("endpoint model name is empty");
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
    if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
    if (max_retries > kMaxRetriesLimit) {
      throw ConfigError("max_retries must be at most " + std::to_string(kMaxRetriesLimit));
    }
  }

  /// Everything but secrets, for run manifests.
  Json to_json() const {
    return Json{{"base_url", base_url},       {"model", model_name},
                {"api_key_env", api_key_env}, {"temperature", temperature},
                {"top_p", top_p},             {"max_tokens", max_tokens},
                {"timeout_ms", timeout.count()}, {"max_retries", max_retries}};
  }
};

struct HttpRequest {
  std::string url;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{0};
};

struct HttpResponse {
  int status = 0;     // 0 when no response arrived
  std::string body;
  std::string error;  // transport-level failure description when status is 0
};

/// Sends one POST. Must be safe to call concurrently.
using Transport = std::function<HttpResponse(const HttpRequest&)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

namespace detail {

inline HttpResponse httplib_post(const HttpRequest& req) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(req.url, m, kUrl)) return {0, "", "unsupported URL " + req.url};
  httplib::Client client(m[1].str());
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(req.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(req.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  httplib::Headers headers;
  for (const auto& [k, v] : req.headers) headers.emplace(k, v);
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = client.Post(path, headers, req.body, "application/json");
  if (!res) return {0, "", httplib::to_string(res.error())};
  return {res->status, res->body, ""};
}

inline bool is_retryable(int status) { return status == 0 || status == 429 || status >= 500; }

inline std::string excerpt(std::string_view body, std::size_t limit = 300) {
  std::string out(body.substr(0, limit));
  if (body.size() > limit) out += "...";
  return out;
}

}  // namespace detail

/// Content-addressed store of completed requests.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(const std::string& digest) const {
    return dir_ / digest.substr(0, 2) / (digest + ".json");
  }

  /// The stored response document, if any.
  std::optional<Json> get(const std::string& digest) const {
    const auto path = path_for(digest);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    const Json doc = load_json(path);
    if (!doc.is_object() || !doc.contains("response")) {
      throw ValidationError(path.string() + ": not a cache entry");
    }
    return std::optional<Json>(std::in_place, doc.at("response"));
  }

  void put(const std::string& digest, const Json& request, const Json& response) const {
    const auto path = path_for(digest);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    write_json(Json{{"key", digest}, {"request", request}, {"response", response}}, path);
  }

 private:
  std::filesystem::path dir_;
};

class ChatClient {
 public:
  /// Without a cache directory every call goes to the network. `transport`
  /// and `sleeper` default to HTTP and std::this_thread::sleep_for.
  ChatClient(EndpointConfig cfg, std::optional<std::filesystem::path> cache_dir,
             Transport transport = {}, Sleeper sleeper = {})
      : cfg_(std::move(cfg)),
        transport_(transport ? std::move(transport) : Transport(detail::httplib_post)),
        sleeper_(sleeper ? std::move(sleeper)
                         : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })) {
    cfg_.validate();
    if (cache_dir) cache_.emplace(std::move(*cache_dir));
  }

  const EndpointConfig& config() const { return cfg_; }

  std::string request_body(std::span<const ChatMessage> messages) const {
    return canonical_dump(request_json(messages));
  }

  std::string cache_key(std::span<const ChatMessage> messages) const {
    return detail::Sha256()
        .update(cfg_.base_url)
        .update(std::string_view("\0", 1))
        .update(cfg_.model_name)
        .update(std::string_view("\0", 1))
        .update(request_body(messages))
        .hex();
  }

  /// Text of the first choice. Throws ConfigError for a missing API key and
  /// TransportError when the endpoint cannot deliver.
  std::string complete(std::span<const ChatMessage> messages) {
    const Json request = request_json(messages);
    const std::string body = canonical_dump(request);
    const std::string key = cache_key(messages);
    if (cache_) {
      if (auto hit = cache_->get(key)) {
        ++cache_hits_;
        return first_choice(*hit, 200);
      }
    }

    HttpRequest req{cfg_.base_url + "/chat/completions", body, {}, cfg_.timeout};
    if (!cfg_.api_key_env.empty()) {
      const char* value = std::getenv(cfg_.api_key_env.c_str());
      if (value == nullptr || *value == '\0') {
        throw ConfigError("API key environment variable " + cfg_.api_key_env + " is not set");
      }
      req.headers.emplace_back("Authorization", std::string("Bearer ") + value);
    }

    std::string last_error;
    int last_status = 0;
    for (unsigned attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) sleeper_(std::min<std::chrono::milliseconds>(cfg_.backoff * (1LL << (attempt - 1)), kMaxBackoff));
      ++network_calls_;
      const HttpResponse res = transport_(req);
      if (res.status >= 200 && res.status < 300) {
        Json doc;
        try {
          doc = Json::parse(res.body);
        } catch (const Json::parse_error&) {
          throw TransportError("malformed response from " + req.url + ": " + detail::excerpt(res.body),
                               res.status, false);
        }
        std::string text = first_choice(doc, res.status);
        if (cache_) cache_->put(key, request, doc);
        return text;
      }
      last_status = res.status;
      last_error = res.status == 0 ? res.error
                                   : "HTTP " + std::to_string(res.status) + ": " + detail::excerpt(res.body);
      if (!detail::is_retryable(res.status)) {
        throw TransportError(req.url + " returned " + last_error, res.status, false);
      }
    }
    throw TransportError(req.url + ": retries exhausted after " + std::to_string(cfg_.max_retries + 1) +
                             " attempts (" + last_error + ")",
                         last_status, true);
  }

  std::string complete(std::initializer_list<ChatMessage> messages) {
    return complete(std::span<const ChatMessage>(messages.begin(), messages.size()));
  }

  std::size_t network_calls() const { return network_calls_; }
  std::size_t cache_hits() const { return cache_hits_; }

 private:
  static constexpr std::chrono::milliseconds kMaxBackoff{std::chrono::seconds(30)};

  Json request_json(std::span<const ChatMessage> messages) const {
    Json msgs = Json::array();
    for (const auto& m : messages) msgs.push_back(Json{{"role", m.role}, {"content", m.content}});
    return Json{{"model", cfg_.model_name},
                {"messages", std::move(msgs)},
                {"temperature", cfg_.temperature},
                {"top_p", cfg_.top_p},
                {"max_tokens", cfg_.max_tokens}};
  }

  static std::string first_choice(const Json& doc, int status) {
    const Json* content = nullptr;
    if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() &&
        !doc["choices"].empty()) {
      const Json& choice = doc["choices"][0];
      if (choice.is_object() && choice.contains("message") && choice["message"].is_object() &&
          choice["message"].contains("content")) {
        content = &choice["message"]["content"];
      }
    }
    if (content == nullptr || !content->is_string()) {
      throw TransportError("response has no choices[0].message.content: " +
                               detail::excerpt(canonical_dump(doc)),
                           status, false);
    }
    return content->get<std::string>();
  }

  EndpointConfig cfg_;
  Transport transport_;
  Sleeper sleeper_;
  std::optional<ResponseCache> cache_;
  std::atomic<std::size_t> network_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

inline GenerationRecord make_generation(const BenchmarkEntry& entry, std::string model_label,
                                        std::string response) {
  GenerationRecord g;
  g.entry_id = entry.id;
  g.model_label = std::move(model_label);
  g.word_count = count_words(response);
  g.violation = g.word_count > entry.target_len;
  g.response = std::move(response);
  return g;
}

inline GenerationRecord make_failure(const BenchmarkEntry& entry, std::string model_label,
                                     std::string error) {
  return GenerationRecord{entry.id, std::move(model_label), "", 0, true, std::move(error)};
}

/// Produces responses for a benchmark. Implementations must be safe to call
/// from several threads.
using ResponseSource = std::function<std::string(const BenchmarkEntry&)>;

/// One record per entry, ordered by entry id. Transport failures become
/// failure records; the run throws only when every entry failed.
inline std::vector<GenerationRecord> generate_with(std::span<const BenchmarkEntry> bench,
                                                   const ResponseSource& source,
                                                   const std::string& model_label,
                                                   std::size_t concurrency) {
  if (bench.empty()) throw ValidationError("benchmark is empty");
  if (concurrency < 1) throw ConfigError("concurrency must be at least 1");
  std::vector<GenerationRecord> out(bench.size());
  detail::parallel_for(bench.size(), concurrency, [&](std::size_t i) {
    try {
      out[i] = make_generation(bench[i], model_label, source(bench[i]));
    } catch (const TransportError& e) {
      out[i] = make_failure(bench[i], model_label, e.what());
    }
  });
  if (std::all_of(out.begin(), out.end(), [](const GenerationRecord& g) { return g.failed(); })) {
    throw TransportError("all " + std::to_string(out.size()) + " generations failed; first: " +
                             *out.front().error,
                         0, false);
  }
  std::stable_sort(out.begin(), out.end(), [](const GenerationRecord& a, const GenerationRecord& b) {
    return a.entry_id < b.entry_id;
  });
  return out;
}

/// Sends each entry's length-instructed prompt as a single user message.
inline std::vector<GenerationRecord> generate_over_benchmark(ChatClient& client,
                                                             std::span<const BenchmarkEntry> bench,
                                                             std::size_t concurrency,
                                                             std::string model_label = {}) {
  if (model_label.empty()) model_label = client.config().model_name;
  return generate_with(
      bench,
      [&client](const BenchmarkEntry& e) { return client.complete({ChatMessage{"user", e.li_prompt}}); },
      model_label, concurrency);
}

}  // namespace lenlift

#endif  // LENLIFT_GENCLIENT_HPP_
