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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "flatingest/csv.hpp"
#include "flatingest/store.hpp"

namespace flatingest::detect {

enum class HeaderStatus { kPresent, kNotPresent };

/// "PRESENT" / "NOT PRESENT", exactly as the log stores them.
std::string_view to_string(HeaderStatus status);
std::optional<HeaderStatus> parse_header_status(std::string_view text);

/// Bare optional sign, digits, at most one decimal point; surrounding spaces
/// ignored. Currency symbols, grouping commas and parentheses disqualify.
bool is_numeric(std::string_view text);

/// PRESENT iff every field is present and none is numeric.
HeaderStatus detect_header(const csv::Record& first_record);

inline constexpr std::size_t kSampleRows = 10;

struct Fingerprint {
  std::string canonical_sample;
  std::string digest;  // lowercase hex SHA-256 of canonical_sample
  std::size_t sampled_rows = 0;

  bool operator==(const Fingerprint&) const = default;
};

std::string sha256_hex(std::string_view bytes);

/// Fingerprint of the first min(10, n) data records.
Fingerprint fingerprint_file(std::span<const csv::Record> data_records);

struct CriticalRule {
  std::optional<std::size_t> column_index;  // 1-based
};

struct CriticalViolation {
  std::size_t record_ordinal;  // 1-based within the data records
  bool operator==(const CriticalViolation&) const = default;
};

/// nullopt means ok (including when the rule is unset).
std::optional<CriticalViolation> validate_critical(
    std::span<const csv::Record> data_records, const CriticalRule& rule);

/// What stages 1 and 2 need from the head of a file.
struct FileSample {
  std::optional<csv::Record> first_record;
  HeaderStatus header = HeaderStatus::kNotPresent;
  std::vector<csv::Record> data_records;  // at most kSampleRows
};

/// Reads only as many records as the sample needs.
FileSample sample_file(const std::filesystem::path& path,
                       const csv::ParseProfile& profile);

/// Persistent first-rows samples of every file accepted for loading.
class ReferenceStore {
 public:
  explicit ReferenceStore(store::Database& db);

  static void create_schema(store::Database& db);

  /// True iff an entry's sample is byte-equal to fp's sample.
  bool check_duplicate(const Fingerprint& fp);

  /// Throws Error(kDuplicateDigest) if the digest is already registered.
  void register_fingerprint(const Fingerprint& fp, std::int64_t sr_num);

  /// Drops the sample owned by `sr_num` (a file whose load failed).
  void unregister(std::int64_t sr_num);

  std::optional<std::int64_t> owner_of(const Fingerprint& fp);
  std::size_t size();

 private:
  store::Database& db_;
};

}  // namespace flatingest::detect
