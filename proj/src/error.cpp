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

#include "flatingest/error.hpp"

namespace flatingest {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEncoding: return "EncodingError";
    case ErrorCode::kUnterminatedQuote: return "UnterminatedQuote";
    case ErrorCode::kQuotedNewlineForbidden: return "QuotedNewlineForbidden";
    case ErrorCode::kStoreUnavailable: return "StoreUnavailable";
    case ErrorCode::kDuplicateDigest: return "DuplicateDigest";
    case ErrorCode::kUnknownSerial: return "UnknownSerial";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kPermissionDenied: return "PermissionDenied";
    case ErrorCode::kNotADirectory: return "NotADirectory";
    case ErrorCode::kTooManyColumns: return "TooManyColumns";
    case ErrorCode::kConfigParse: return "ParseError";
    case ErrorCode::kConfigValidation: return "ValidationError";
    case ErrorCode::kMissingRequired: return "MissingRequired";
  }
  return "Unknown";
}

}  // namespace flatingest
