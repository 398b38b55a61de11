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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flatingest/detect.hpp"
#include "flatingest/store.hpp"
#include "flatingest/timestamp.hpp"

namespace flatingest::catalog {

enum class FileStatus { kInProgress, kComplete, kIncomplete };

std::string_view to_string(FileStatus status);
std::optional<FileStatus> parse_file_status(std::string_view text);

/// One row of the audit log. `header` is nullopt until stage 1 ran and is
/// rendered "UNKNOWN".
struct LogEntry {
  std::int64_t sr_num = 0;
  std::string fil_type = "CSV";
  std::string fil_name;
  std::string fil_path;
  std::int64_t fil_size = 0;
  std::optional<detect::HeaderStatus> header;
  FileStatus fil_status = FileStatus::kInProgress;
  bool dup_file = false;
  std::optional<std::int64_t> rows_num;
  std::optional<std::int64_t> col_num;
  std::int64_t rejects_num = 0;
  Timestamp created_at{};
  Timestamp modified_at{};

  bool operator==(const LogEntry&) const = default;
};

std::string_view header_text(const std::optional<detect::HeaderStatus>& h);

struct EntryPatch {
  std::optional<std::string> fil_path;
  std::optional<detect::HeaderStatus> header;
  std::optional<FileStatus> fil_status;
  std::optional<bool> dup_file;
  std::optional<std::int64_t> rows_num;
  std::optional<std::int64_t> col_num;
  std::optional<std::int64_t> rejects_num;
};

struct Filter {
  std::optional<FileStatus> status;
  std::optional<bool> dup_file;
  std::optional<std::string> name_substring;
};

/// Throws Error(kInvariantViolation) describing the first broken rule.
void check_invariants(const LogEntry& e);

class Catalog {
 public:
  explicit Catalog(store::Database& db);

  static void create_schema(store::Database& db);

  std::int64_t append_entry(std::string_view name, std::string_view path,
                            std::int64_t size);
  void update_entry(std::int64_t sr_num, const EntryPatch& patch);

  LogEntry entry(std::int64_t sr_num);  // throws kUnknownSerial
  std::vector<LogEntry> query(const Filter& filter = {});

 private:
  store::Database& db_;
};

/// Column order of the log: the ten classic columns then the extensions.
extern const std::vector<std::string> kExportColumns;

/// Canonical CSV with a column-name header row; null counts are empty.
std::string export_csv(const std::vector<LogEntry>& entries);
std::vector<LogEntry> parse_export(std::string_view csv_bytes);

}  // namespace flatingest::catalog
