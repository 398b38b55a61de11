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

#include "flatingest/catalog.hpp"

#include <algorithm>

#include "flatingest/csv.hpp"

namespace flatingest::catalog {
namespace {

constexpr std::string_view kSelect =
    "SELECT sr_num, fil_type, fil_name, fil_path, fil_size, header,"
    " fil_status, dup_file, rows_num, col_num, rejects_num, created_at,"
    " modified_at FROM log_entries";

std::optional<detect::HeaderStatus> parse_header(std::string_view text) {
  if (text == "UNKNOWN") return std::nullopt;
  auto h = detect::parse_header_status(text);
  if (!h) {
    throw Error(ErrorCode::kInvariantViolation,
                "bad header value: " + std::string(text));
  }
  return h;
}

LogEntry read_row(const store::Statement& s) {
  LogEntry e;
  e.sr_num = s.column_int64(0);
  e.fil_type = s.column_text(1);
  e.fil_name = s.column_text(2);
  e.fil_path = s.column_text(3);
  e.fil_size = s.column_int64(4);
  e.header = parse_header(s.column_text(5));
  e.fil_status = parse_file_status(s.column_text(6)).value();
  e.dup_file = s.column_text(7) == "Y";
  e.rows_num = s.column_opt_int64(8);
  e.col_num = s.column_opt_int64(9);
  e.rejects_num = s.column_int64(10);
  e.created_at = parse_iso8601(s.column_text(11)).value();
  e.modified_at = parse_iso8601(s.column_text(12)).value();
  return e;
}

std::string opt_text(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

std::string_view to_string(FileStatus status) {
  switch (status) {
    case FileStatus::kInProgress: return "IN_PROGRESS";
    case FileStatus::kComplete: return "COMPLETE";
    case FileStatus::kIncomplete: return "INCOMPLETE";
  }
  return "";
}

std::optional<FileStatus> parse_file_status(std::string_view text) {
  if (text == "IN_PROGRESS") return FileStatus::kInProgress;
  if (text == "COMPLETE") return FileStatus::kComplete;
  if (text == "INCOMPLETE") return FileStatus::kIncomplete;
  return std::nullopt;
}

std::string_view header_text(const std::optional<detect::HeaderStatus>& h) {
  return h ? detect::to_string(*h) : "UNKNOWN";
}

void check_invariants(const LogEntry& e) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvariantViolation,
                "entry " + std::to_string(e.sr_num) + ": " + why);
  };
  if (e.fil_status == FileStatus::kComplete) {
    if (!e.rows_num || !e.col_num) fail("COMPLETE requires row and column counts");
    if (e.dup_file) fail("COMPLETE entry cannot be a duplicate");
  }
  if (e.dup_file) {
    if (e.fil_status != FileStatus::kIncomplete) fail("duplicate must be INCOMPLETE");
    if (e.rows_num || e.col_num) fail("duplicate must have null counts");
  }
  if (e.rows_num && *e.rows_num < 0) fail("negative row count");
  if (e.col_num && *e.col_num < 1) fail("column count must be positive");
  if (e.rejects_num < 0) fail("negative reject count");
  if (e.fil_size < 0) fail("negative size");
  if (e.modified_at < e.created_at) fail("modified before created");
}

Catalog::Catalog(store::Database& db) : db_(db) {}

void Catalog::create_schema(store::Database& db) {
  db.exec(
      "CREATE TABLE IF NOT EXISTS log_entries ("
      " sr_num INTEGER PRIMARY KEY AUTOINCREMENT,"
      " fil_type TEXT NOT NULL,"
      " fil_name TEXT NOT NULL,"
      " fil_path TEXT NOT NULL,"
      " fil_size INTEGER NOT NULL,"
      " header TEXT NOT NULL,"
      " fil_status TEXT NOT NULL,"
      " dup_file TEXT NOT NULL,"
      " rows_num INTEGER,"
      " col_num INTEGER,"
      " rejects_num INTEGER NOT NULL DEFAULT 0,"
      " created_at TEXT NOT NULL,"
      " modified_at TEXT NOT NULL)");
}

std::int64_t Catalog::append_entry(std::string_view name, std::string_view path,
                                   std::int64_t size) {
  auto guard = db_.lock();
  std::string ts = format_iso8601(now_utc());
  auto stmt = db_.prepare(
      "INSERT INTO log_entries (fil_type, fil_name, fil_path, fil_size, header,"
      " fil_status, dup_file, rejects_num, created_at, modified_at)"
      " VALUES ('CSV', ?1, ?2, ?3, 'UNKNOWN', 'IN_PROGRESS', 'N', 0, ?4, ?4)");
  stmt.bind(1, name).bind(2, path).bind(3, size).bind(4, std::string_view(ts));
  stmt.run();
  return db_.last_insert_rowid();
}

LogEntry Catalog::entry(std::int64_t sr_num) {
  auto guard = db_.lock();
  auto stmt = db_.prepare(std::string(kSelect) + " WHERE sr_num = ?1");
  stmt.bind(1, sr_num);
  if (!stmt.step()) {
    throw Error(ErrorCode::kUnknownSerial,
                "unknown SR " + std::to_string(sr_num));
  }
  return read_row(stmt);
}

void Catalog::update_entry(std::int64_t sr_num, const EntryPatch& patch) {
  db_.transaction([&] {
    LogEntry e = entry(sr_num);
    if (patch.fil_path) e.fil_path = *patch.fil_path;
    if (patch.header) e.header = *patch.header;
    if (patch.fil_status) e.fil_status = *patch.fil_status;
    if (patch.dup_file) e.dup_file = *patch.dup_file;
    if (patch.rows_num) e.rows_num = *patch.rows_num;
    if (patch.col_num) e.col_num = *patch.col_num;
    if (patch.rejects_num) e.rejects_num = *patch.rejects_num;
    e.modified_at = std::max(now_utc(), e.created_at);
    check_invariants(e);

    std::string ts = format_iso8601(e.modified_at);
    auto stmt = db_.prepare(
        "UPDATE log_entries SET fil_path = ?2, header = ?3, fil_status = ?4,"
        " dup_file = ?5, rows_num = ?6, col_num = ?7, rejects_num = ?8,"
        " modified_at = ?9 WHERE sr_num = ?1");
    stmt.bind(1, sr_num)
        .bind(2, std::string_view(e.fil_path))
        .bind(3, header_text(e.header))
        .bind(4, to_string(e.fil_status))
        .bind(5, std::string_view(e.dup_file ? "Y" : "N"))
        .bind(6, e.rows_num)
        .bind(7, e.col_num)
        .bind(8, e.rejects_num)
        .bind(9, std::string_view(ts));
    stmt.run();
  });
}

std::vector<LogEntry> Catalog::query(const Filter& filter) {
  auto guard = db_.lock();
  std::string sql(kSelect);
  sql += " WHERE 1=1";
  if (filter.status) sql += " AND fil_status = ?1";
  if (filter.dup_file) sql += " AND dup_file = ?2";
  if (filter.name_substring) sql += " AND instr(fil_name, ?3) > 0";
  sql += " ORDER BY sr_num";
  auto stmt = db_.prepare(sql);
  if (filter.status) stmt.bind(1, to_string(*filter.status));
  if (filter.dup_file) stmt.bind(2, std::string_view(*filter.dup_file ? "Y" : "N"));
  if (filter.name_substring) stmt.bind(3, std::string_view(*filter.name_substring));
  std::vector<LogEntry> out;
  while (stmt.step()) out.push_back(read_row(stmt));
  return out;
}

const std::vector<std::string> kExportColumns = {
    "SR_NUM",   "FIL_TYPE",   "FIL_NAME", "FIL_PATH", "FIL_SIZE",
    "HEADER",   "FIL_STATUS", "DUP_FILE", "ROWS_NUM", "COL_NUM",
    "REJECTS_NUM", "CREATED_AT", "MODIFIED_AT"};

std::string export_csv(const std::vector<LogEntry>& entries) {
  using csv::Field;
  std::string out;
  std::vector<Field> row;
  for (const auto& c : kExportColumns) row.push_back(Field::present(c));
  csv::append_canonical_record(out, row);
  for (const LogEntry& e : entries) {
    row = {Field::present(std::to_string(e.sr_num)),
           Field::present(e.fil_type),
           Field::present(e.fil_name),
           Field::present(e.fil_path),
           Field::present(std::to_string(e.fil_size)),
           Field::present(std::string(header_text(e.header))),
           Field::present(std::string(to_string(e.fil_status))),
           Field::present(e.dup_file ? "Y" : "N"),
           Field::present(opt_text(e.rows_num)),
           Field::present(opt_text(e.col_num)),
           Field::present(std::to_string(e.rejects_num)),
           Field::present(format_iso8601(e.created_at)),
           Field::present(format_iso8601(e.modified_at))};
    csv::append_canonical_record(out, row);
  }
  return out;
}

std::vector<LogEntry> parse_export(std::string_view csv_bytes) {
  auto records = csv::parse_all(csv_bytes);
  std::vector<LogEntry> out;
  auto bad = [](const std::string& why) {
    throw Error(ErrorCode::kInvariantViolation, "bad catalog export: " + why);
  };
  if (records.empty()) bad("missing header row");
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != kExportColumns.size()) bad("wrong column count");
    auto text = [&](std::size_t k) { return std::string(f[k].text()); };
    auto num = [&](std::size_t k) { return std::stoll(text(k)); };
    auto opt_num = [&](std::size_t k) -> std::optional<std::int64_t> {
      if (f[k].is_absent()) return std::nullopt;
      return num(k);
    };
    LogEntry e;
    e.sr_num = num(0);
    e.fil_type = text(1);
    e.fil_name = text(2);
    e.fil_path = text(3);
    e.fil_size = num(4);
    e.header = parse_header(text(5));
    auto status = parse_file_status(text(6));
    if (!status) bad("status " + text(6));
    e.fil_status = *status;
    e.dup_file = text(7) == "Y";
    e.rows_num = opt_num(8);
    e.col_num = opt_num(9);
    e.rejects_num = num(10);
    auto created = parse_iso8601(text(11));
    auto modified = parse_iso8601(text(12));
    if (!created || !modified) bad("timestamp");
    e.created_at = *created;
    e.modified_at = *modified;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace flatingest::catalog
