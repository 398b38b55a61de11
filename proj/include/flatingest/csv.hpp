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
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatingest/error.hpp"

namespace flatingest::csv {

/// One decoded cell. A field is either present text or absent; present empty
/// text is collapsed into absent, so `Field::present("")` is absent.
class Field {
 public:
  Field() = default;

  static Field absent() { return Field(); }
  static Field present(std::string text) {
    Field f;
    if (!text.empty()) f.text_ = std::move(text);
    return f;
  }

  bool is_absent() const noexcept { return !text_.has_value(); }
  bool is_present() const noexcept { return text_.has_value(); }

  /// Text of a present field; empty view for absent.
  std::string_view text() const noexcept {
    return text_ ? std::string_view(*text_) : std::string_view();
  }
  const std::optional<std::string>& value() const noexcept { return text_; }

  bool operator==(const Field&) const = default;

 private:
  std::optional<std::string> text_;
};

struct Record {
  std::vector<Field> fields;
  /// 1-based physical line on which the record starts.
  std::uint64_t source_line = 0;
  /// 1-based columns whose token carried a quote outside quoting.
  std::vector<std::size_t> stray_quote_columns;

  std::size_t size() const noexcept { return fields.size(); }
  const Field& operator[](std::size_t i) const { return fields[i]; }
};

struct ParseProfile {
  bool allow_quoted_newlines = true;
  char delimiter = ',';

  /// Throws std::invalid_argument if the delimiter is a quote or line break.
  void validate() const;
};

struct FieldRun {
  Field field;
  /// Index of the delimiter or line break that ended the field, or the size
  /// of the input when the field ran to the end.
  std::size_t next = 0;
  bool stray_quote = false;
};

/// Decodes the field starting at `pos`. Quoted fields decode doubled quotes
/// and may span line breaks; spaces before an opening quote and after a
/// closing quote are dropped. Throws ParseError(kUnterminatedQuote, line 0)
/// when a quoted field is not closed within `chars`.
FieldRun parse_field_run(std::string_view chars, std::size_t pos,
                         char delimiter = ',');

/// Pull-based tokenizer over a byte source. Buffers at most one record plus
/// one read chunk, independent of input size.
class RecordStream {
 public:
  static constexpr std::size_t kDefaultChunkSize = 64 * 1024;

  RecordStream(std::istream& in, ParseProfile profile = {},
               std::size_t chunk_size = kDefaultChunkSize);
  RecordStream(std::unique_ptr<std::istream> in, ParseProfile profile = {},
               std::size_t chunk_size = kDefaultChunkSize);

  RecordStream(RecordStream&&) noexcept;
  RecordStream& operator=(RecordStream&&) noexcept;
  RecordStream(const RecordStream&) = delete;
  RecordStream& operator=(const RecordStream&) = delete;
  ~RecordStream();

  /// Next record in file order, or nullopt at end of input.
  std::optional<Record> next();

  /// Largest number of bytes held in the internal buffer so far.
  std::size_t buffer_high_water() const noexcept;
  std::uint64_t records_emitted() const noexcept;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Opens `path` for streaming. Throws Error(kIo) if it cannot be opened.
RecordStream open_record_stream(const std::filesystem::path& path,
                                ParseProfile profile = {});

/// Parses an in-memory byte sequence completely.
std::vector<Record> parse_all(std::string_view bytes, ParseProfile profile = {});

/// Canonical CSV: minimal quoting with doubled-quote escapes, absent fields
/// as empty tokens, CR LF after every record.
std::string write_canonical(std::span<const Record> records,
                            char delimiter = ',');
void append_canonical_record(std::string& out, std::span<const Field> fields,
                             char delimiter = ',');

}  // namespace flatingest::csv
