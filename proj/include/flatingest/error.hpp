/*
 * Copyright 2026 The flatingest Authors
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

namespace flatingest {

enum class ErrorCode {
  kEncoding,
  kUnterminatedQuote,
  kQuotedNewlineForbidden,
  kStoreUnavailable,
  kDuplicateDigest,
  kUnknownSerial,
  kInvariantViolation,
  kIllegalTransition,
  kIo,
  kPermissionDenied,
  kNotADirectory,
  kTooManyColumns,
  kConfigParse,
  kConfigValidation,
  kMissingRequired,
};

/// Stable identifier used in diagnostics, e.g. "UnterminatedQuote".
const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Tokenizer failure. `line` is the 1-based physical line (0 when the input
/// was a bare character run with no line context); `byte_offset` is set for
/// encoding errors.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::uint64_t line, std::uint64_t byte_offset,
             const std::string& message)
      : Error(code, message), line_(line), byte_offset_(byte_offset) {}

  std::uint64_t line() const noexcept { return line_; }
  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t line_;
  std::uint64_t byte_offset_;
};

}  // namespace flatingest
