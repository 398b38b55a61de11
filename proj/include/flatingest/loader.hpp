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
#include <vector>

#include "flatingest/csv.hpp"
#include "flatingest/store.hpp"

namespace flatingest::loader {

inline constexpr std::size_t kDefaultTableWidth = 64;
inline constexpr std::size_t kDefaultBatchThreshold = 1000;

/// One row of the shared wide table. `cells` always has table-width entries.
struct GenericRow {
  std::int64_t row_id = 0;  // assigned by the table
  std::int64_t source_sr = 0;
  std::vector<std::optional<std::string>> cells;

  bool operator==(const GenericRow&) const = default;
};

/// Destination of flushed batches. Implementations must make a batch durable
/// or throw, leaving no partial batch behind.
class RowSink {
 public:
  virtual ~RowSink() = default;
  virtual void append_rows(std::span<const GenericRow> rows) = 0;
  virtual void remove_rows(std::int64_t source_sr) = 0;
};

/// The generic table (ROW_ID, SOURCE_SR, COL1..COLW) plus the pending-load
/// markers that make abort survive a restart.
class GenericTable : public RowSink {
 public:
  /// Throws Error(kConfigValidation) if the stored width differs.
  GenericTable(store::Database& db, std::size_t width);

  static void create_schema(store::Database& db, std::size_t width);
  /// Width the table was created with, or nullopt if it does not exist.
  static std::optional<std::size_t> stored_width(store::Database& db);

  std::size_t width() const noexcept { return width_; }

  void append_rows(std::span<const GenericRow> rows) override;
  void remove_rows(std::int64_t source_sr) override;

  void begin_load(std::int64_t source_sr);
  void end_load(std::int64_t source_sr);
  /// Removes rows of every load still marked pending; returns their serials.
  std::vector<std::int64_t> recover_pending();

  std::int64_t count_rows();
  std::int64_t count_rows(std::int64_t source_sr);
  std::vector<GenericRow> rows_for(std::int64_t source_sr);
  std::vector<GenericRow> all_rows();

  /// Canonical CSV: header row ROW_ID,SOURCE_SR,COL1..COLW then every row.
  std::string export_csv();

 private:
  std::vector<GenericRow> select_rows(const std::optional<std::int64_t>& sr);

  store::Database& db_;
  std::size_t width_;
  std::optional<store::Statement> insert_;
};

/// Field count of the header (or first data record); 1 <= n <= table_width.
/// Throws Error(kTooManyColumns) past the width.
std::size_t detect_column_count(const csv::Record& first_record,
                                std::size_t table_width);

struct LoadResult {
  std::int64_t rows_loaded = 0;
  std::size_t col_num = 0;
  std::int64_t rejects = 0;
};

/// Threshold-bounded staging buffer for one file.
class BatchBuffer {
 public:
  BatchBuffer(RowSink& sink, std::size_t capacity, std::int64_t source_sr,
              std::size_t col_num, std::size_t table_width);

  /// Pads short records with nulls and quarantines records wider than
  /// col_num. Flushes when the buffer reaches capacity.
  void buffer_record(const csv::Record& record);

  /// Appends all pending rows; no-op when nothing is pending. On failure the
  /// rows stay pending.
  void flush();

  LoadResult finalize();

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t pending() const noexcept { return pending_.size(); }
  std::size_t flush_count() const noexcept { return flush_count_; }
  std::int64_t rows_loaded() const noexcept { return rows_loaded_; }
  std::int64_t rejects() const noexcept { return rejects_; }

 private:
  RowSink& sink_;
  std::size_t capacity_;
  std::int64_t source_sr_;
  std::size_t col_num_;
  std::size_t table_width_;
  std::vector<GenericRow> pending_;
  std::size_t flush_count_ = 0;
  std::int64_t rows_loaded_ = 0;
  std::int64_t rejects_ = 0;
};

/// Removes every row loaded for `source_sr`.
void abort_load(RowSink& sink, std::int64_t source_sr);

}  // namespace flatingest::loader
