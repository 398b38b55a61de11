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

#include "flatingest/loader.hpp"

#include <stdexcept>

namespace flatingest::loader {

GenericTable::GenericTable(store::Database& db, std::size_t width)
    : db_(db), width_(width) {
  auto stored = stored_width(db);
  if (!stored) {
    throw Error(ErrorCode::kStoreUnavailable, "generic table does not exist");
  }
  if (*stored != width) {
    throw Error(ErrorCode::kConfigValidation,
                "table_width " + std::to_string(width) +
                    " does not match generic table width " +
                    std::to_string(*stored));
  }
}

void GenericTable::create_schema(store::Database& db, std::size_t width) {
  if (width == 0) throw std::invalid_argument("table width must be >= 1");
  db.transaction([&] {
    db.exec(
        "CREATE TABLE IF NOT EXISTS workspace_meta ("
        " key TEXT PRIMARY KEY, value TEXT NOT NULL)");
    db.exec(
        "CREATE TABLE IF NOT EXISTS pending_loads ("
        " source_sr INTEGER PRIMARY KEY)");
    if (stored_width(db)) return;
    std::string sql =
        "CREATE TABLE generic_rows ("
        " row_id INTEGER PRIMARY KEY AUTOINCREMENT,"
        " source_sr INTEGER NOT NULL";
    for (std::size_t c = 1; c <= width; ++c) {
      sql += ", col" + std::to_string(c) + " TEXT";
    }
    sql += ")";
    db.exec(sql);
    db.exec("CREATE INDEX generic_rows_source ON generic_rows (source_sr)");
    auto stmt = db.prepare(
        "INSERT INTO workspace_meta (key, value) VALUES ('table_width', ?1)");
    stmt.bind(1, std::string_view(std::to_string(width)));
    stmt.run();
  });
}

std::optional<std::size_t> GenericTable::stored_width(store::Database& db) {
  auto guard = db.lock();
  auto probe = db.prepare(
      "SELECT 1 FROM sqlite_master WHERE type = 'table'"
      " AND name = 'workspace_meta'");
  if (!probe.step()) return std::nullopt;
  auto stmt = db.prepare(
      "SELECT value FROM workspace_meta WHERE key = 'table_width'");
  if (!stmt.step()) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(stmt.column_text(0)));
}

void GenericTable::append_rows(std::span<const GenericRow> rows) {
  if (rows.empty()) return;
  db_.transaction([&] {
    if (!insert_) {
      std::string sql = "INSERT INTO generic_rows (source_sr";
      for (std::size_t c = 1; c <= width_; ++c) sql += ", col" + std::to_string(c);
      sql += ") VALUES (?1";
      for (std::size_t c = 1; c <= width_; ++c) sql += ", ?" + std::to_string(c + 1);
      sql += ")";
      insert_.emplace(db_.prepare(sql));
    }
    for (const GenericRow& row : rows) {
      if (row.cells.size() != width_) {
        throw std::invalid_argument("row width does not match table width");
      }
      insert_->reset();
      insert_->bind(1, row.source_sr);
      for (std::size_t c = 0; c < width_; ++c) {
        const int index = static_cast<int>(c + 2);
        if (row.cells[c]) {
          insert_->bind(index, std::string_view(*row.cells[c]));
        }
      }
      insert_->run();
    }
  });
}

void GenericTable::remove_rows(std::int64_t source_sr) {
  auto guard = db_.lock();
  auto stmt = db_.prepare("DELETE FROM generic_rows WHERE source_sr = ?1");
  stmt.bind(1, source_sr);
  stmt.run();
}

void GenericTable::begin_load(std::int64_t source_sr) {
  auto guard = db_.lock();
  auto stmt = db_.prepare(
      "INSERT OR IGNORE INTO pending_loads (source_sr) VALUES (?1)");
  stmt.bind(1, source_sr);
  stmt.run();
}

void GenericTable::end_load(std::int64_t source_sr) {
  auto guard = db_.lock();
  auto stmt = db_.prepare("DELETE FROM pending_loads WHERE source_sr = ?1");
  stmt.bind(1, source_sr);
  stmt.run();
}

std::vector<std::int64_t> GenericTable::recover_pending() {
  return db_.transaction([&] {
    std::vector<std::int64_t> serials;
    {
      auto stmt = db_.prepare("SELECT source_sr FROM pending_loads ORDER BY 1");
      while (stmt.step()) serials.push_back(stmt.column_int64(0));
    }
    for (std::int64_t sr : serials) {
      remove_rows(sr);
      end_load(sr);
    }
    return serials;
  });
}

std::int64_t GenericTable::count_rows() {
  auto guard = db_.lock();
  auto stmt = db_.prepare("SELECT COUNT(*) FROM generic_rows");
  stmt.step();
  return stmt.column_int64(0);
}

std::int64_t GenericTable::count_rows(std::int64_t source_sr) {
  auto guard = db_.lock();
  auto stmt =
      db_.prepare("SELECT COUNT(*) FROM generic_rows WHERE source_sr = ?1");
  stmt.bind(1, source_sr);
  stmt.step();
  return stmt.column_int64(0);
}

std::vector<GenericRow> GenericTable::select_rows(
    const std::optional<std::int64_t>& sr) {
  auto guard = db_.lock();
  std::string sql = "SELECT * FROM generic_rows";
  if (sr) sql += " WHERE source_sr = ?1";
  sql += " ORDER BY row_id";
  auto stmt = db_.prepare(sql);
  if (sr) stmt.bind(1, *sr);
  std::vector<GenericRow> rows;
  while (stmt.step()) {
    GenericRow row;
    row.row_id = stmt.column_int64(0);
    row.source_sr = stmt.column_int64(1);
    row.cells.reserve(width_);
    for (std::size_t c = 0; c < width_; ++c) {
      row.cells.push_back(stmt.column_opt_text(static_cast<int>(c + 2)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GenericRow> GenericTable::rows_for(std::int64_t source_sr) {
  return select_rows(source_sr);
}

std::vector<GenericRow> GenericTable::all_rows() { return select_rows(std::nullopt); }

std::string GenericTable::export_csv() {
  using csv::Field;
  std::string out;
  std::vector<Field> fields;
  fields.push_back(Field::present("ROW_ID"));
  fields.push_back(Field::present("SOURCE_SR"));
  for (std::size_t c = 1; c <= width_; ++c) {
    fields.push_back(Field::present("COL" + std::to_string(c)));
  }
  csv::append_canonical_record(out, fields);
  for (const GenericRow& row : all_rows()) {
    fields.clear();
    fields.push_back(Field::present(std::to_string(row.row_id)));
    fields.push_back(Field::present(std::to_string(row.source_sr)));
    for (const auto& cell : row.cells) {
      fields.push_back(cell ? Field::present(*cell) : Field::absent());
    }
    csv::append_canonical_record(out, fields);
  }
  return out;
}

std::size_t detect_column_count(const csv::Record& first_record,
                                std::size_t table_width) {
  const std::size_t n = first_record.size();
  if (n > table_width) {
    throw Error(ErrorCode::kTooManyColumns,
                "TooManyColumns: " + std::to_string(n) + " fields exceed table width " +
                    std::to_string(table_width));
  }
  return n;
}

BatchBuffer::BatchBuffer(RowSink& sink, std::size_t capacity,
                         std::int64_t source_sr, std::size_t col_num,
                         std::size_t table_width)
    : sink_(sink),
      capacity_(capacity),
      source_sr_(source_sr),
      col_num_(col_num),
      table_width_(table_width) {
  if (capacity == 0) throw std::invalid_argument("batch capacity must be >= 1");
  if (col_num == 0 || col_num > table_width) {
    throw std::invalid_argument("col_num must be in [1, table_width]");
  }
  pending_.reserve(capacity);
}

void BatchBuffer::buffer_record(const csv::Record& record) {
  if (record.size() > col_num_) {
    ++rejects_;
    return;
  }
  GenericRow row;
  row.source_sr = source_sr_;
  row.cells.resize(table_width_);
  for (std::size_t c = 0; c < record.size(); ++c) {
    if (record.fields[c].is_present()) {
      row.cells[c].emplace(record.fields[c].text());
    }
  }
  pending_.push_back(std::move(row));
  if (pending_.size() >= capacity_) flush();
}

void BatchBuffer::flush() {
  if (pending_.empty()) return;
  sink_.append_rows(pending_);
  rows_loaded_ += static_cast<std::int64_t>(pending_.size());
  pending_.clear();
  ++flush_count_;
}

LoadResult BatchBuffer::finalize() {
  flush();
  return LoadResult{rows_loaded_, col_num_, rejects_};
}

void abort_load(RowSink& sink, std::int64_t source_sr) {
  sink.remove_rows(source_sr);
}

}  // namespace flatingest::loader
