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

#include <filesystem>
#include <memory>

#include "flatingest/catalog.hpp"
#include "flatingest/detect.hpp"
#include "flatingest/loader.hpp"
#include "flatingest/store.hpp"
#include "flatingest/workflow.hpp"

namespace flatingest {

/// A root folder with its workflow subfolders and the store holding the
/// catalog, the reference samples and the generic table.
class Workspace {
 public:
  static constexpr const char* kStoreFileName = "flatingest.db";

  /// Creates folders and stores; idempotent. Throws Error(kConfigValidation)
  /// if the existing generic table has another width.
  static void init(const std::filesystem::path& root,
                   std::size_t table_width = loader::kDefaultTableWidth);
  static bool initialized(const std::filesystem::path& root);
  static std::filesystem::path store_path(const std::filesystem::path& root);

  /// Opens an initialized workspace. `table_width` nullopt accepts the
  /// stored width.
  explicit Workspace(const std::filesystem::path& root,
                     std::optional<std::size_t> table_width = std::nullopt);

  const workflow::FolderSet& folders() const noexcept { return folders_; }
  store::Database& db() noexcept { return *db_; }
  catalog::Catalog& catalog() noexcept { return *catalog_; }
  detect::ReferenceStore& references() noexcept { return *references_; }
  loader::GenericTable& table() noexcept { return *table_; }

 private:
  workflow::FolderSet folders_;
  std::unique_ptr<store::Database> db_;
  std::unique_ptr<catalog::Catalog> catalog_;
  std::unique_ptr<detect::ReferenceStore> references_;
  std::unique_ptr<loader::GenericTable> table_;
};

}  // namespace flatingest
