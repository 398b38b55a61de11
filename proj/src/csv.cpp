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

#include "flatingest/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace flatingest::csv {
namespace {

constexpr char kQuote = '"';

bool is_line_break(char c) { return c == '\r' || c == '\n'; }

// Incremental UTF-8 validator. Rejects overlongs, surrogates and code points
// above U+10FFFF.
class Utf8Validator {
 public:
  // Returns the absolute offset of the first invalid sequence, if any.
  std::optional<std::uint64_t> feed(const char* data, std::size_t n,
                                    std::uint64_t base) {
    const auto* p = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      unsigned char b = p[i];
      if (need_ == 0) {
        if (b < 0x80) continue;
        seq_start_ = base + i;
        seen_ = 1;
        lo_ = 0x80;
        hi_ = 0xBF;
        if (b >= 0xC2 && b <= 0xDF) {
          need_ = 1;
        } else if (b == 0xE0) {
          need_ = 2;
          lo_ = 0xA0;
        } else if ((b >= 0xE1 && b <= 0xEC) || b == 0xEE || b == 0xEF) {
          need_ = 2;
        } else if (b == 0xED) {
          need_ = 2;
          hi_ = 0x9F;
        } else if (b == 0xF0) {
          need_ = 3;
          lo_ = 0x90;
        } else if (b >= 0xF1 && b <= 0xF3) {
          need_ = 3;
        } else if (b == 0xF4) {
          need_ = 3;
          hi_ = 0x8F;
        } else {
          return seq_start_;
        }
      } else {
        if (b < lo_ || b > hi_) return seq_start_;
        lo_ = 0x80;
        hi_ = 0xBF;
        --need_;
        ++seen_;
      }
    }
    return std::nullopt;
  }

  bool incomplete() const noexcept { return need_ > 0; }
  std::size_t pending_bytes() const noexcept { return need_ > 0 ? seen_ : 0; }
  std::uint64_t sequence_start() const noexcept { return seq_start_; }

 private:
  int need_ = 0;
  std::size_t seen_ = 0;
  unsigned char lo_ = 0x80;
  unsigned char hi_ = 0xBF;
  std::uint64_t seq_start_ = 0;
};

[[noreturn]] void throw_encoding(std::uint64_t offset, std::uint64_t line) {
  throw ParseError(ErrorCode::kEncoding, line, offset,
                   "EncodingError offset " + std::to_string(offset));
}

[[noreturn]] void throw_unterminated(std::uint64_t line) {
  throw ParseError(ErrorCode::kUnterminatedQuote, line, 0,
                   "UnterminatedQuote line " + std::to_string(line));
}

bool needs_quoting(std::string_view text, char delimiter) {
  return std::any_of(text.begin(), text.end(), [delimiter](char c) {
    return c == delimiter || c == kQuote || is_line_break(c);
  });
}

}  // namespace

void ParseProfile::validate() const {
  if (delimiter == kQuote || is_line_break(delimiter)) {
    throw std::invalid_argument("delimiter must not be a quote or line break");
  }
}

FieldRun parse_field_run(std::string_view chars, std::size_t pos,
                         char delimiter) {
  const std::size_t n = chars.size();
  auto is_end = [delimiter](char c) {
    return c == delimiter || is_line_break(c);
  };

  std::size_t j = pos;
  while (j < n && chars[j] == ' ') ++j;

  if (j >= n || chars[j] != kQuote) {
    std::size_t e = pos;
    while (e < n && !is_end(chars[e])) ++e;
    std::string_view token = chars.substr(pos, e - pos);
    FieldRun run;
    run.field = Field::present(std::string(token));
    run.next = e;
    run.stray_quote = token.find(kQuote) != std::string_view::npos;
    return run;
  }

  std::string out;
  std::size_t k = j + 1;
  for (;;) {
    std::size_t q = chars.find(kQuote, k);
    if (q == std::string_view::npos) throw_unterminated(0);
    out.append(chars.substr(k, q - k));
    if (q + 1 < n && chars[q + 1] == kQuote) {
      out.push_back(kQuote);
      k = q + 2;
    } else {
      k = q + 1;
      break;
    }
  }

  std::size_t e = k;
  while (e < n && !is_end(chars[e])) ++e;
  std::string_view tail = chars.substr(k, e - k);
  FieldRun run;
  if (tail.find_first_not_of(' ') != std::string_view::npos) {
    out.append(tail);
    run.stray_quote = true;
  }
  run.field = Field::present(std::move(out));
  run.next = e;
  return run;
}

struct RecordStream::State {
  std::istream* in = nullptr;
  std::unique_ptr<std::istream> owned;
  ParseProfile profile;
  std::size_t chunk_size = kDefaultChunkSize;

  std::string buf;
  std::size_t start = 0;      // first unconsumed byte
  std::size_t valid_end = 0;  // bytes before this index are validated
  std::uint64_t base_offset = 0;  // absolute offset of buf[0]

  Utf8Validator utf8;
  std::optional<std::uint64_t> bad_offset;
  bool eof = false;
  bool bom_checked = false;

  std::uint64_t line = 1;
  bool skip_lf = false;
  std::size_t high_water = 0;
  std::uint64_t emitted = 0;

  // Makes more validated bytes available. Returns false when none can be.
  bool fill() {
    if (start > 0) {
      buf.erase(0, start);
      valid_end -= start;
      base_offset += start;
      start = 0;
    }
    while (!eof && !bad_offset) {
      std::size_t old = buf.size();
      buf.resize(old + chunk_size);
      in->read(buf.data() + old, static_cast<std::streamsize>(chunk_size));
      auto got = static_cast<std::size_t>(in->gcount());
      buf.resize(old + got);
      high_water = std::max(high_water, buf.size());
      if (got == 0) {
        eof = true;
        break;
      }
      bad_offset = utf8.feed(buf.data() + old, got, base_offset + old);
      std::size_t new_valid =
          bad_offset ? static_cast<std::size_t>(*bad_offset - base_offset)
                     : buf.size() - utf8.pending_bytes();
      if (!bom_checked && (new_valid >= 3 || eof || bad_offset)) {
        bom_checked = true;
        if (buf.compare(0, 3, "\xEF\xBB\xBF") == 0 && new_valid >= 3) {
          start = 3;
          if (valid_end < 3) valid_end = 3;
        }
      }
      if (new_valid > valid_end) {
        valid_end = new_valid;
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void fail_at_end_of_valid() {
    if (bad_offset) throw_encoding(*bad_offset, line);
    throw_encoding(utf8.sequence_start(), line);
  }

  // `i` indexes a CR or LF; returns the index after the full terminator.
  std::size_t consume_terminator(std::size_t i) {
    ++line;
    if (buf[i] == '\r') {
      if (i + 1 < valid_end) {
        return buf[i + 1] == '\n' ? i + 2 : i + 1;
      }
      skip_lf = true;
    }
    return i + 1;
  }
};

RecordStream::RecordStream(std::istream& in, ParseProfile profile,
                           std::size_t chunk_size)
    : state_(std::make_unique<State>()) {
  profile.validate();
  state_->in = &in;
  state_->profile = profile;
  state_->chunk_size = std::max<std::size_t>(chunk_size, 1);
}

RecordStream::RecordStream(std::unique_ptr<std::istream> in,
                           ParseProfile profile, std::size_t chunk_size)
    : RecordStream(*in, profile, chunk_size) {
  state_->owned = std::move(in);
}

RecordStream::RecordStream(RecordStream&&) noexcept = default;
RecordStream& RecordStream::operator=(RecordStream&&) noexcept = default;
RecordStream::~RecordStream() = default;

std::size_t RecordStream::buffer_high_water() const noexcept {
  return state_->high_water;
}

std::uint64_t RecordStream::records_emitted() const noexcept {
  return state_->emitted;
}

std::optional<Record> RecordStream::next() {
  State& s = *state_;
  const char delim = s.profile.delimiter;

  enum class Mode { kFieldStart, kUnquoted, kQuoted, kQuoteSeen, kAfterQuoted };
  Mode mode = Mode::kFieldStart;
  bool has_bytes = false;
  std::uint64_t record_line = s.line;
  std::uint64_t quote_line = 0;
  std::size_t i = s.start;
  std::size_t end = 0;
  bool at_eof = false;

  for (;;) {
    if (i >= s.valid_end) {
      std::size_t shift = s.start;
      bool more = s.fill();
      i -= shift;
      if (i < s.start) i = s.start;  // skipped byte-order mark
      if (!more) {
        if (s.bad_offset || s.utf8.incomplete()) s.fail_at_end_of_valid();
        if (mode == Mode::kQuoted) throw_unterminated(quote_line);
        if (!has_bytes) return std::nullopt;
        end = i;
        at_eof = true;
        break;
      }
      continue;
    }

    if (!has_bytes && s.skip_lf) {
      s.skip_lf = false;
      if (s.buf[i] == '\n') {
        s.start = ++i;
        continue;
      }
    }

    const char* data = s.buf.data();
    switch (mode) {
      case Mode::kFieldStart: {
        char c = data[i];
        if (c == ' ') {
          has_bytes = true;
          ++i;
        } else if (c == kQuote) {
          has_bytes = true;
          mode = Mode::kQuoted;
          quote_line = s.line;
          ++i;
        } else if (c == delim) {
          has_bytes = true;
          ++i;
        } else if (is_line_break(c)) {
          if (has_bytes) {
            end = i;
            goto record_end;
          }
          // Blank physical line.
          i = s.consume_terminator(i);
          s.start = i;
          record_line = s.line;
        } else {
          has_bytes = true;
          mode = Mode::kUnquoted;
        }
        break;
      }
      case Mode::kUnquoted:
      case Mode::kAfterQuoted: {
        std::size_t j = i;
        while (j < s.valid_end) {
          char c = data[j];
          if (c == delim || is_line_break(c)) break;
          ++j;
        }
        if (j == s.valid_end) {
          i = j;
        } else if (data[j] == delim) {
          mode = Mode::kFieldStart;
          i = j + 1;
        } else {
          end = j;
          goto record_end;
        }
        break;
      }
      case Mode::kQuoted: {
        std::size_t j = i;
        while (j < s.valid_end) {
          char c = data[j];
          if (c == kQuote || is_line_break(c)) break;
          ++j;
        }
        if (j == s.valid_end) {
          i = j;
        } else if (data[j] == kQuote) {
          mode = Mode::kQuoteSeen;
          i = j + 1;
        } else {
          if (!s.profile.allow_quoted_newlines) {
            throw ParseError(ErrorCode::kQuotedNewlineForbidden, s.line, 0,
                             "QuotedNewlineForbidden line " +
                                 std::to_string(s.line));
          }
          if (!(data[j] == '\n' && j > s.start && data[j - 1] == '\r')) {
            ++s.line;
          }
          i = j + 1;
        }
        break;
      }
      case Mode::kQuoteSeen: {
        char c = data[i];
        if (c == kQuote) {
          mode = Mode::kQuoted;
          ++i;
        } else if (c == delim) {
          mode = Mode::kFieldStart;
          ++i;
        } else if (is_line_break(c)) {
          end = i;
          goto record_end;
        } else {
          mode = Mode::kAfterQuoted;
        }
        break;
      }
    }
  }

record_end:
  Record record;
  record.source_line = record_line;
  {
    std::string_view text(s.buf.data() + s.start, end - s.start);
    std::size_t pos = 0;
    for (;;) {
      FieldRun run = parse_field_run(text, pos, delim);
      record.fields.push_back(std::move(run.field));
      if (run.stray_quote) {
        record.stray_quote_columns.push_back(record.fields.size());
      }
      if (run.next >= text.size()) break;
      pos = run.next + 1;
    }
  }
  s.start = at_eof ? end : s.consume_terminator(end);
  ++s.emitted;
  return record;
}

RecordStream open_record_stream(const std::filesystem::path& path,
                                ParseProfile profile) {
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  return RecordStream(std::move(in), profile);
}

std::vector<Record> parse_all(std::string_view bytes, ParseProfile profile) {
  std::istringstream in{std::string(bytes)};
  RecordStream stream(in, profile);
  std::vector<Record> out;
  while (auto r = stream.next()) out.push_back(std::move(*r));
  return out;
}

void append_canonical_record(std::string& out, std::span<const Field> fields,
                             char delimiter) {
  if (fields.size() == 1 && fields[0].is_absent()) {
    out.append("\"\"\r\n");
    return;
  }
  bool first = true;
  for (const Field& f : fields) {
    if (!first) out.push_back(delimiter);
    first = false;
    std::string_view text = f.text();
    if (!needs_quoting(text, delimiter)) {
      out.append(text);
      continue;
    }
    out.push_back(kQuote);
    for (char c : text) {
      if (c == kQuote) out.push_back(kQuote);
      out.push_back(c);
    }
    out.push_back(kQuote);
  }
  out.append("\r\n");
}

std::string write_canonical(std::span<const Record> records, char delimiter) {
  std::string out;
  for (const Record& r : records) {
    append_canonical_record(out, r.fields, delimiter);
  }
  return out;
}

}  // namespace flatingest::csv
