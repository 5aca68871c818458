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

#ifndef LENLIFT_JSONL_HPP_
#define LENLIFT_JSONL_HPP_

#include <atomic>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unistd.h>
#include <vector>

#include "lenlift/error.hpp"
#include "lenlift/records.hpp"

namespace lenlift {

template <typename T>
concept KeyedRecord = requires(const T& t) {
  { RecordSchema<T>::key(t) } -> std::convertible_to<std::string>;
};

/// Parses JSONL text. Blank lines are skipped; any malformed record fails the
/// whole load with "line N: ..." so no partial dataset escapes.
template <typename T>
std::vector<T> parse_jsonl(std::istream& in, std::string_view source = "<input>") {
  std::vector<T> records;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ValidationError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ValidationError(where + "expected a JSON object");
    try {
      records.push_back(RecordSchema<T>::from_json(j, records.size()));
    } catch (const FieldError& e) {
      throw ValidationError(where + e.what());
    }
    if constexpr (KeyedRecord<T>) {
      const std::string key = RecordSchema<T>::key(records.back());
      auto [it, inserted] = first_line.emplace(key, line_no);
      if (!inserted) {
        throw ValidationError(where + "duplicate id " + key + " (first seen on line " +
                              std::to_string(it->second) + ")");
      }
    }
  }
  if (records.empty()) std::cerr << "warning: " << source << " contains no records\n";
  return records;
}

template <typename T>
std::vector<T> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  try {
    return parse_jsonl<T>(in, path.string());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline std::vector<PreferenceTriple> load_triples(const std::filesystem::path& path) {
  return load_jsonl<PreferenceTriple>(path);
}

/// One record per line, fixed key order, newline-terminated.
template <typename T>
std::string format_jsonl(std::span<const T> records) {
  std::string out;
  for (const auto& r : records) {
    out += canonical_dump(RecordSchema<T>::to_json(r));
    out += '\n';
  }
  return out;
}

/// Writes `bytes` to `path` through a temporary file and a rename, so readers
/// never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string() + ": " + ec.message());
  }
}

template <typename T>
void write_jsonl(std::span<const T> records, const std::filesystem::path& path) {
  write_file_atomic(path, format_jsonl(records));
}

template <typename T>
void write_jsonl(const std::vector<T>& records, const std::filesystem::path& path) {
  write_jsonl(std::span<const T>(records), path);
}

/// Pretty-free single-document JSON file with a trailing newline.
inline void write_json(const Json& doc, const std::filesystem::path& path) {
  write_file_atomic(path, canonical_dump(doc) + "\n");
}

inline Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace lenlift

#endif  // LENLIFT_JSONL_HPP_
