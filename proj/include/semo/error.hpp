// Copyright 2026 The SEMO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMO__ERROR_HPP_
#define SEMO__ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semo {

/// Failure categories shared by every module.
enum class Errc {
  MissingField,
  MalformedField,
  NonMonotonicTimestamp,
  IoFailure,
  ParseError,
  SourceExhausted,
  TooFewSamples,
  DegenerateSystem,
  ScenarioInvalid,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::MalformedField: return "MalformedField";
    case Errc::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ParseError: return "ParseError";
    case Errc::SourceExhausted: return "SourceExhausted";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DegenerateSystem: return "DegenerateSystem";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
  }
  return "Unknown";
}

/**
 * @brief Exception carrying an Errc and, for log parsing, the offending line.
 */
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &what,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code), line_(line) {}

  Errc code() const noexcept { return code_; }

  /// 1-based line number for ParseError raised while loading a log.
  std::optional<std::size_t> line() const noexcept { return line_; }

private:
  Errc code_;
  std::optional<std::size_t> line_;
};

} // namespace semo

#endif // SEMO__ERROR_HPP_
