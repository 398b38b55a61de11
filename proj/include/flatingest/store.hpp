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

#include <sqlite3.h>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "flatingest/error.hpp"

// Thin RAII layer over SQLite shared by the catalog, reference store and
// generic table.
namespace flatingest::store {

class Statement {
 public:
  Statement(sqlite3* db, std::string_view sql);
  Statement(Statement&& other) noexcept;
  Statement& operator=(Statement&& other) noexcept;
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;
  ~Statement();

  Statement& bind(int index, std::int64_t value);
  Statement& bind(int index, std::string_view value);
  Statement& bind_blob(int index, std::string_view value);
  Statement& bind_null(int index);
  Statement& bind(int index, const std::optional<std::int64_t>& value);
  Statement& bind(int index, const std::optional<std::string>& value);

  /// Returns true while a row is available.
  bool step();
  void run() { step(); }
  void reset();

  bool is_null(int column) const;
  std::int64_t column_int64(int column) const;
  std::optional<std::int64_t> column_opt_int64(int column) const;
  std::string column_text(int column) const;
  std::optional<std::string> column_opt_text(int column) const;

 private:
  sqlite3* db_ = nullptr;
  sqlite3_stmt* stmt_ = nullptr;
};

class Database {
 public:
  enum class Mode { kCreate, kOpenExisting };

  Database(const std::filesystem::path& file, Mode mode);
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;
  ~Database();

  const std::filesystem::path& path() const noexcept { return path_; }

  void exec(std::string_view sql);
  Statement prepare(std::string_view sql);
  std::int64_t last_insert_rowid() const;

  /// Serializes access from parallel workers; held for a whole transaction.
  std::unique_lock<std::recursive_mutex> lock() {
    return std::unique_lock<std::recursive_mutex>(mutex_);
  }

  /// Runs `fn` inside a (nestable) savepoint; rolls back if it throws.
  template <typename Fn>
  decltype(auto) transaction(Fn&& fn) {
    auto guard = lock();
    std::string name = "sp" + std::to_string(depth_++);
    exec("SAVEPOINT " + name);
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        exec("RELEASE " + name);
        --depth_;
      } else {
        decltype(auto) result = fn();
        exec("RELEASE " + name);
        --depth_;
        return result;
      }
    } catch (...) {
      try {
        exec("ROLLBACK TO " + name);
        exec("RELEASE " + name);
      } catch (...) {
      }
      --depth_;
      throw;
    }
  }

 private:
  std::filesystem::path path_;
  sqlite3* db_ = nullptr;
  std::recursive_mutex mutex_;
  int depth_ = 0;
};

[[noreturn]] void throw_store_error(sqlite3* db, std::string_view what);

}  // namespace flatingest::store
