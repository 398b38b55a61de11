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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flatingest/error.hpp"

namespace flatingest::config {

struct SinkSpec {
  enum class Kind { kFile, kCommand };
  Kind kind = Kind::kFile;
  std::string target;

  /// "file:<path>" or "command:<template>"
  std::string to_string() const;
  static SinkSpec parse(std::string_view text);  // throws kConfigValidation

  bool operator==(const SinkSpec&) const = default;
};

inline constexpr std::uint64_t kDefaultMaxFileSizeBytes = 250ULL * 1024 * 1024;

struct PipelineConfig {
  std::filesystem::path source_dir;
  std::filesystem::path root_dir;
  std::uint64_t batch_threshold = 1000;
  std::uint64_t max_file_size_bytes = kDefaultMaxFileSizeBytes;
  std::size_t table_width = 64;
  std::optional<std::size_t> critical_column;
  bool allow_quoted_newlines = true;
  std::size_t workers = 1;
  std::vector<SinkSpec> notify_sinks;

  /// Throws Error(kMissingRequired) or Error(kConfigValidation).
  void validate() const;

  bool operator==(const PipelineConfig&) const = default;
};

/// Command-line values; every set field wins over the file.
struct Overrides {
  std::optional<std::filesystem::path> source_dir;
  std::optional<std::filesystem::path> root_dir;
  std::optional<std::uint64_t> batch_threshold;
  std::optional<std::uint64_t> max_file_size_bytes;
  std::optional<std::size_t> table_width;
  std::optional<std::size_t> critical_column;
  std::optional<bool> allow_quoted_newlines;
  std::optional<std::size_t> workers;
};

/// Applies a key=value document onto `base`. Throws Error(kConfigParse) with
/// the line number for malformed lines and unknown keys, and
/// Error(kConfigValidation) for bad values.
PipelineConfig parse_config_text(std::string_view text,
                                 PipelineConfig base = {});

/// Defaults, then the file (if any), then overrides; validated.
PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                           const Overrides& overrides = {});

/// Every key, one per line, in a form parse_config_text reads back.
std::string serialize(const PipelineConfig& config);

}  // namespace flatingest::config
