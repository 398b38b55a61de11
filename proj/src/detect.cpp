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

#include "flatingest/detect.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>

namespace flatingest::detect {

std::string_view to_string(HeaderStatus status) {
  return status == HeaderStatus::kPresent ? "PRESENT" : "NOT PRESENT";
}

std::optional<HeaderStatus> parse_header_status(std::string_view text) {
  if (text == "PRESENT") return HeaderStatus::kPresent;
  if (text == "NOT PRESENT") return HeaderStatus::kNotPresent;
  return std::nullopt;
}

bool is_numeric(std::string_view text) {
  auto first = text.find_first_not_of(' ');
  if (first == std::string_view::npos) return false;
  auto last = text.find_last_not_of(' ');
  text = text.substr(first, last - first + 1);

  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') ++i;
  bool digit = false;
  bool point = false;
  for (; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isdigit(c)) {
      digit = true;
    } else if (c == '.' && !point) {
      point = true;
    } else {
      return false;
    }
  }
  return digit;
}

HeaderStatus detect_header(const csv::Record& first_record) {
  bool header = std::all_of(
      first_record.fields.begin(), first_record.fields.end(),
      [](const csv::Field& f) { return f.is_present() && !is_numeric(f.text()); });
  return header ? HeaderStatus::kPresent : HeaderStatus::kNotPresent;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

Fingerprint fingerprint_file(std::span<const csv::Record> data_records) {
  auto sample = data_records.first(std::min(data_records.size(), kSampleRows));
  Fingerprint fp;
  fp.canonical_sample = csv::write_canonical(sample);
  fp.digest = sha256_hex(fp.canonical_sample);
  fp.sampled_rows = sample.size();
  return fp;
}

std::optional<CriticalViolation> validate_critical(
    std::span<const csv::Record> data_records, const CriticalRule& rule) {
  if (!rule.column_index) return std::nullopt;
  const std::size_t col = *rule.column_index;
  auto sample = data_records.first(std::min(data_records.size(), kSampleRows));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& fields = sample[i].fields;
    if (fields.size() < col || fields[col - 1].is_absent()) {
      return CriticalViolation{i + 1};
    }
  }
  return std::nullopt;
}

FileSample sample_file(const std::filesystem::path& path,
                       const csv::ParseProfile& profile) {
  FileSample sample;
  auto stream = csv::open_record_stream(path, profile);
  sample.first_record = stream.next();
  if (!sample.first_record) return sample;
  sample.header = detect_header(*sample.first_record);
  if (sample.header == HeaderStatus::kNotPresent) {
    sample.data_records.push_back(*sample.first_record);
  }
  while (sample.data_records.size() < kSampleRows) {
    auto r = stream.next();
    if (!r) break;
    sample.data_records.push_back(std::move(*r));
  }
  return sample;
}

ReferenceStore::ReferenceStore(store::Database& db) : db_(db) {}

void ReferenceStore::create_schema(store::Database& db) {
  db.exec(
      "CREATE TABLE IF NOT EXISTS reference_samples ("
      " digest TEXT PRIMARY KEY,"
      " canonical_sample BLOB NOT NULL,"
      " sampled_rows INTEGER NOT NULL,"
      " owner_sr_num INTEGER NOT NULL)");
}

bool ReferenceStore::check_duplicate(const Fingerprint& fp) {
  return owner_of(fp).has_value();
}

std::optional<std::int64_t> ReferenceStore::owner_of(const Fingerprint& fp) {
  auto guard = db_.lock();
  auto stmt = db_.prepare(
      "SELECT canonical_sample, owner_sr_num FROM reference_samples"
      " WHERE digest = ?1");
  stmt.bind(1, std::string_view(fp.digest));
  while (stmt.step()) {
    if (stmt.column_text(0) == fp.canonical_sample) {
      return stmt.column_int64(1);
    }
  }
  return std::nullopt;
}

void ReferenceStore::register_fingerprint(const Fingerprint& fp,
                                          std::int64_t sr_num) {
  auto guard = db_.lock();
  auto probe = db_.prepare("SELECT 1 FROM reference_samples WHERE digest = ?1");
  probe.bind(1, std::string_view(fp.digest));
  if (probe.step()) {
    throw Error(ErrorCode::kDuplicateDigest,
                "digest already registered: " + fp.digest);
  }
  auto stmt = db_.prepare(
      "INSERT INTO reference_samples"
      " (digest, canonical_sample, sampled_rows, owner_sr_num)"
      " VALUES (?1, ?2, ?3, ?4)");
  stmt.bind(1, std::string_view(fp.digest))
      .bind_blob(2, fp.canonical_sample)
      .bind(3, static_cast<std::int64_t>(fp.sampled_rows))
      .bind(4, sr_num);
  stmt.run();
}

void ReferenceStore::unregister(std::int64_t sr_num) {
  auto guard = db_.lock();
  auto stmt =
      db_.prepare("DELETE FROM reference_samples WHERE owner_sr_num = ?1");
  stmt.bind(1, sr_num);
  stmt.run();
}

std::size_t ReferenceStore::size() {
  auto guard = db_.lock();
  auto stmt = db_.prepare("SELECT COUNT(*) FROM reference_samples");
  stmt.step();
  auto n = static_cast<std::size_t>(stmt.column_int64(0));
  stmt.reset();
  return n;
}

}  // namespace flatingest::detect
