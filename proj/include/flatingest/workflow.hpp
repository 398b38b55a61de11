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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flatingest/catalog.hpp"

namespace flatingest::workflow {

enum class Stage { kReceived, kIn, kInProgress, kArchived, kException };

enum class ExceptionReason {
  kDuplicate,
  kCriticalNull,
  kTooLarge,
  kParseFailure,
  kEncoding,
};

std::string_view to_string(ExceptionReason reason);

class FileState {
 public:
  static FileState received() { return FileState(Stage::kReceived); }
  static FileState in() { return FileState(Stage::kIn); }
  static FileState in_progress() { return FileState(Stage::kInProgress); }
  static FileState archived() { return FileState(Stage::kArchived); }
  static FileState exception(ExceptionReason reason) {
    FileState s(Stage::kException);
    s.reason_ = reason;
    return s;
  }

  Stage stage() const noexcept { return stage_; }
  std::optional<ExceptionReason> reason() const noexcept { return reason_; }
  bool terminal() const noexcept {
    return stage_ == Stage::kArchived || stage_ == Stage::kException;
  }

  /// "ARCHIVED", "EXCEPTION(DUPLICATE)", ...
  std::string to_string() const;

  bool operator==(const FileState&) const = default;

 private:
  explicit FileState(Stage stage) : stage_(stage) {}
  Stage stage_;
  std::optional<ExceptionReason> reason_;
};

bool is_legal(const FileState& from, const FileState& to);

/// Root plus its four workflow subfolders.
struct FolderSet {
  std::filesystem::path root;
  std::filesystem::path in;
  std::filesystem::path in_progress;
  std::filesystem::path archive;
  std::filesystem::path exception;

  explicit FolderSet(const std::filesystem::path& root_dir);

  /// nullopt for kReceived, which lives in the source folder.
  std::optional<std::filesystem::path> folder_for(Stage stage) const;
};

/// Creates In, InProgress, Archive and Exception under `root_dir` (and the
/// root itself) when missing. Throws Error(kPermissionDenied) or
/// Error(kNotADirectory).
FolderSet ensure_folders(const std::filesystem::path& root_dir);

/// Regular `*.csv` files (any case), sorted by file name.
std::vector<std::filesystem::path> scan_source(
    const std::filesystem::path& source_dir);

enum class SizeCheck { kOk, kTooLarge };

SizeCheck guard_size(const std::filesystem::path& file, std::uint64_t max_bytes);

struct ManagedFile {
  std::int64_t sr_num = 0;
  std::filesystem::path current_path;
  std::uint64_t size_bytes = 0;
  FileState state = FileState::received();
};

/// Moves the file into the folder of `to` and records the new path (plus
/// `extra`) in the catalog. A name already taken in the destination gets
/// `_<sr_num>` before its extension. On failure the file stays where it was.
ManagedFile transition(const ManagedFile& file, const FileState& to,
                       const FolderSet& folders, catalog::Catalog& catalog,
                       const catalog::EntryPatch& extra = {});

/// Rename, falling back to copy-and-remove across filesystems.
void move_file(const std::filesystem::path& from,
               const std::filesystem::path& to);

}  // namespace flatingest::workflow
