/*
 * Copyright 2026 The amclab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace amclab {

// Base of every error thrown by the library. `kind()` is a stable short tag
// used by the CLI for its machine-parsable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error("parameter", w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config", w) {}
};
struct StateError : Error {
  explicit StateError(const std::string& w) : Error("state", w) {}
};
struct DataError : Error {
  explicit DataError(const std::string& w) : Error("data", w) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& w) : Error("degenerate", w) {}
};
struct DeepFadeError : Error {
  explicit DeepFadeError(const std::string& w) : Error("deep_fade", w) {}
};
struct InterfaceError : Error {
  explicit InterfaceError(const std::string& w) : Error("interface", w) {}
};
struct UnsupportedModeError : Error {
  explicit UnsupportedModeError(const std::string& w) : Error("unsupported_mode", w) {}
};

// Malformed or truncated binary file. Carries the byte offset where decoding
// failed and, when known, the index of the record being decoded.
class FormatError : public Error {
 public:
  static constexpr std::int64_t kNoRecord = -1;

  FormatError(const std::string& w, std::uint64_t offset, std::int64_t record = kNoRecord)
      : Error("format", w + " at byte " + std::to_string(offset) +
                            (record >= 0 ? " (record " + std::to_string(record) + ")" : "")),
        offset_(offset),
        record_(record) {}

  std::uint64_t offset() const noexcept { return offset_; }
  std::int64_t record() const noexcept { return record_; }

 private:
  std::uint64_t offset_;
  std::int64_t record_;
};

}  // namespace amclab
