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

#include "flatingest/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace flatingest::config {
namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void invalid(std::string_view key, const std::string& why) {
  throw Error(ErrorCode::kConfigValidation,
              "ValidationError: " + std::string(key) + ": " + why);
}

std::uint64_t parse_positive(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    invalid(key, "expected a positive integer, got '" + std::string(value) + "'");
  }
  if (v == 0) invalid(key, "must be >= 1");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  invalid(key, "expected true or false, got '" + std::string(value) + "'");
}

bool is_within(const std::filesystem::path& inner,
               const std::filesystem::path& outer) {
  auto a = std::filesystem::weakly_canonical(inner);
  auto b = std::filesystem::weakly_canonical(outer);
  auto mismatch = std::mismatch(b.begin(), b.end(), a.begin(), a.end());
  return mismatch.first == b.end();
}

}  // namespace

std::string SinkSpec::to_string() const {
  return (kind == Kind::kFile ? "file:" : "command:") + target;
}

SinkSpec SinkSpec::parse(std::string_view text) {
  SinkSpec spec;
  if (text.substr(0, 5) == "file:") {
    spec.kind = Kind::kFile;
    spec.target = std::string(text.substr(5));
  } else if (text.substr(0, 8) == "command:") {
    spec.kind = Kind::kCommand;
    spec.target = std::string(text.substr(8));
  } else {
    invalid("notify_sink", "expected file:<path> or command:<template>");
  }
  if (spec.target.empty()) invalid("notify_sink", "empty sink target");
  return spec;
}

void PipelineConfig::validate() const {
  if (source_dir.empty()) {
    throw Error(ErrorCode::kMissingRequired, "MissingRequired: source_dir");
  }
  if (root_dir.empty()) {
    throw Error(ErrorCode::kMissingRequired, "MissingRequired: root_dir");
  }
  if (batch_threshold < 1) invalid("batch_threshold", "must be >= 1");
  if (max_file_size_bytes < 1) invalid("max_file_size_bytes", "must be >= 1");
  if (table_width < 1) invalid("table_width", "must be >= 1");
  if (workers < 1) invalid("workers", "must be >= 1");
  if (critical_column) {
    if (*critical_column < 1) invalid("critical_column", "must be >= 1");
    if (*critical_column > table_width) {
      invalid("critical_column", "exceeds table_width");
    }
  }
  for (const char* sub : {"In", "InProgress", "Archive", "Exception"}) {
    if (is_within(source_dir, root_dir / sub)) {
      invalid("source_dir", std::string("must not be inside root_dir/") + sub);
    }
  }
}

PipelineConfig parse_config_text(std::string_view text, PipelineConfig base) {
  PipelineConfig cfg = std::move(base);
  bool sinks_reset = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigParse,
                  "ParseError: line " + std::to_string(line_no) +
                      ": expected key = value");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));

    if (key == "source_dir") {
      cfg.source_dir = std::string(value);
    } else if (key == "root_dir") {
      cfg.root_dir = std::string(value);
    } else if (key == "batch_threshold") {
      cfg.batch_threshold = parse_positive(key, value);
    } else if (key == "max_file_size_bytes") {
      cfg.max_file_size_bytes = parse_positive(key, value);
    } else if (key == "table_width") {
      cfg.table_width = parse_positive(key, value);
    } else if (key == "critical_column") {
      cfg.critical_column = parse_positive(key, value);
    } else if (key == "allow_quoted_newlines") {
      cfg.allow_quoted_newlines = parse_bool(key, value);
    } else if (key == "workers") {
      cfg.workers = parse_positive(key, value);
    } else if (key == "notify_sink") {
      if (!sinks_reset) {
        cfg.notify_sinks.clear();
        sinks_reset = true;
      }
      cfg.notify_sinks.push_back(SinkSpec::parse(value));
    } else {
      throw Error(ErrorCode::kConfigParse,
                  "ParseError: line " + std::to_string(line_no) +
                      ": unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                           const Overrides& o) {
  PipelineConfig cfg;
  if (file) {
    std::ifstream in(*file, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::kConfigParse,
                  "ParseError: cannot read " + file->string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg = parse_config_text(ss.str(), cfg);
  }
  if (o.source_dir) cfg.source_dir = *o.source_dir;
  if (o.root_dir) cfg.root_dir = *o.root_dir;
  if (o.batch_threshold) cfg.batch_threshold = *o.batch_threshold;
  if (o.max_file_size_bytes) cfg.max_file_size_bytes = *o.max_file_size_bytes;
  if (o.table_width) cfg.table_width = *o.table_width;
  if (o.critical_column) cfg.critical_column = *o.critical_column;
  if (o.allow_quoted_newlines) cfg.allow_quoted_newlines = *o.allow_quoted_newlines;
  if (o.workers) cfg.workers = *o.workers;
  cfg.validate();
  return cfg;
}

std::string serialize(const PipelineConfig& c) {
  std::ostringstream out;
  out << "source_dir = " << c.source_dir.string() << '\n'
      << "root_dir = " << c.root_dir.string() << '\n'
      << "batch_threshold = " << c.batch_threshold << '\n'
      << "max_file_size_bytes = " << c.max_file_size_bytes << '\n'
      << "table_width = " << c.table_width << '\n';
  if (c.critical_column) out << "critical_column = " << *c.critical_column << '\n';
  out << "allow_quoted_newlines = " << (c.allow_quoted_newlines ? "true" : "false")
      << '\n'
      << "workers = " << c.workers << '\n';
  for (const auto& s : c.notify_sinks) out << "notify_sink = " << s.to_string() << '\n';
  return out.str();
}

}  // namespace flatingest::config
