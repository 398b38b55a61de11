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

#include "flatingest/workflow.hpp"

#include <algorithm>
#include <cctype>
#include <system_error>

namespace flatingest::workflow {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void throw_fs(const fs::filesystem_error& e) {
  if (e.code() == std::errc::permission_denied ||
      e.code() == std::errc::operation_not_permitted ||
      e.code() == std::errc::read_only_file_system) {
    throw Error(ErrorCode::kPermissionDenied, e.what());
  }
  if (e.code() == std::errc::not_a_directory ||
      e.code() == std::errc::file_exists) {
    throw Error(ErrorCode::kNotADirectory, e.what());
  }
  throw Error(ErrorCode::kIo, e.what());
}

fs::path free_destination(const fs::path& folder, const fs::path& name,
                          std::int64_t sr_num) {
  fs::path dest = folder / name;
  if (!fs::exists(dest)) return dest;
  std::string stem = name.stem().string();
  std::string ext = name.extension().string();
  dest = folder / (stem + "_" + std::to_string(sr_num) + ext);
  for (int n = 2; fs::exists(dest); ++n) {
    dest = folder / (stem + "_" + std::to_string(sr_num) + "_" +
                     std::to_string(n) + ext);
  }
  return dest;
}

}  // namespace

std::string_view to_string(ExceptionReason reason) {
  switch (reason) {
    case ExceptionReason::kDuplicate: return "DUPLICATE";
    case ExceptionReason::kCriticalNull: return "CRITICAL_NULL";
    case ExceptionReason::kTooLarge: return "TOO_LARGE";
    case ExceptionReason::kParseFailure: return "PARSE_FAILURE";
    case ExceptionReason::kEncoding: return "ENCODING";
  }
  return "";
}

std::string FileState::to_string() const {
  switch (stage_) {
    case Stage::kReceived: return "RECEIVED";
    case Stage::kIn: return "IN";
    case Stage::kInProgress: return "IN_PROGRESS";
    case Stage::kArchived: return "ARCHIVED";
    case Stage::kException:
      return "EXCEPTION(" + std::string(workflow::to_string(*reason_)) + ")";
  }
  return "";
}

bool is_legal(const FileState& from, const FileState& to) {
  using R = ExceptionReason;
  auto reason_in = [&](std::initializer_list<R> allowed) {
    return to.stage() == Stage::kException &&
           std::find(allowed.begin(), allowed.end(), *to.reason()) !=
               allowed.end();
  };
  switch (from.stage()) {
    case Stage::kReceived:
      return to.stage() == Stage::kIn || reason_in({R::kTooLarge});
    case Stage::kIn:
      return to.stage() == Stage::kInProgress ||
             reason_in({R::kDuplicate, R::kCriticalNull});
    case Stage::kInProgress:
      return to.stage() == Stage::kArchived ||
             reason_in({R::kParseFailure, R::kEncoding});
    case Stage::kArchived:
    case Stage::kException:
      return false;
  }
  return false;
}

FolderSet::FolderSet(const fs::path& root_dir)
    : root(root_dir),
      in(root_dir / "In"),
      in_progress(root_dir / "InProgress"),
      archive(root_dir / "Archive"),
      exception(root_dir / "Exception") {}

std::optional<fs::path> FolderSet::folder_for(Stage stage) const {
  switch (stage) {
    case Stage::kReceived: return std::nullopt;
    case Stage::kIn: return in;
    case Stage::kInProgress: return in_progress;
    case Stage::kArchived: return archive;
    case Stage::kException: return exception;
  }
  return std::nullopt;
}

FolderSet ensure_folders(const fs::path& root_dir) {
  FolderSet folders(root_dir);
  try {
    if (fs::exists(root_dir) && !fs::is_directory(root_dir)) {
      throw Error(ErrorCode::kNotADirectory,
                  root_dir.string() + " is not a directory");
    }
    fs::create_directories(root_dir);
    for (const fs::path& p : {folders.in, folders.in_progress, folders.archive,
                              folders.exception}) {
      if (fs::exists(p) && !fs::is_directory(p)) {
        throw Error(ErrorCode::kNotADirectory, p.string() + " is not a directory");
      }
      fs::create_directory(p);
    }
  } catch (const fs::filesystem_error& e) {
    throw_fs(e);
  }
  return folders;
}

std::vector<fs::path> scan_source(const fs::path& source_dir) {
  std::vector<fs::path> out;
  try {
    for (const auto& entry : fs::directory_iterator(source_dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
      });
      if (ext == ".csv") out.push_back(entry.path());
    }
  } catch (const fs::filesystem_error& e) {
    throw_fs(e);
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

SizeCheck guard_size(const fs::path& file, std::uint64_t max_bytes) {
  std::error_code ec;
  auto size = fs::file_size(file, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot stat " + file.string() + ": " + ec.message());
  return size <= max_bytes ? SizeCheck::kOk : SizeCheck::kTooLarge;
}

void move_file(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::rename(from, to, ec);
  if (!ec) return;
  if (ec != std::errc::cross_device_link) {
    throw Error(ErrorCode::kIo, "move " + from.string() + " -> " + to.string() +
                                    ": " + ec.message());
  }
  fs::copy_file(from, to, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "copy " + from.string() + ": " + ec.message());
  }
  fs::remove(from, ec);
  if (ec) {
    fs::remove(to);
    throw Error(ErrorCode::kIo, "remove " + from.string() + ": " + ec.message());
  }
}

ManagedFile transition(const ManagedFile& file, const FileState& to,
                       const FolderSet& folders, catalog::Catalog& catalog,
                       const catalog::EntryPatch& extra) {
  if (!is_legal(file.state, to)) {
    throw Error(ErrorCode::kIllegalTransition,
                "illegal transition " + file.state.to_string() + " -> " +
                    to.to_string());
  }
  fs::path dest = free_destination(*folders.folder_for(to.stage()),
                                   file.current_path.filename(), file.sr_num);
  move_file(file.current_path, dest);

  catalog::EntryPatch patch = extra;
  patch.fil_path = dest.string();
  try {
    catalog.update_entry(file.sr_num, patch);
  } catch (...) {
    std::error_code ec;
    fs::rename(dest, file.current_path, ec);
    throw;
  }

  ManagedFile moved = file;
  moved.current_path = dest;
  moved.state = to;
  return moved;
}

}  // namespace flatingest::workflow
