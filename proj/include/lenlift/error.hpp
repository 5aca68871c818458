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

#ifndef LENLIFT_ERROR_HPP_
#define LENLIFT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lenlift {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: bad JSONL, schema violations, broken invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad or missing configuration (flags, config file, environment).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures, always carrying the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A model endpoint could not produce a completion.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status, bool retries_exhausted)
      : Error(what), status_(status), retries_exhausted_(retries_exhausted) {}

  /// HTTP status, or 0 when no response arrived.
  int status() const noexcept { return status_; }
  /// True when every attempt failed with a retryable condition.
  bool retries_exhausted() const noexcept { return retries_exhausted_; }

 private:
  int status_;
  bool retries_exhausted_;
};

}  // namespace lenlift

#endif  // LENLIFT_ERROR_HPP_
