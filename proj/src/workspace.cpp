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

#include "flatingest/workspace.hpp"

namespace flatingest {
namespace fs = std::filesystem;

fs::path Workspace::store_path(const fs::path& root) {
  return root / kStoreFileName;
}

bool Workspace::initialized(const fs::path& root) {
  std::error_code ec;
  return fs::is_regular_file(store_path(root), ec);
}

void Workspace::init(const fs::path& root, std::size_t table_width) {
  workflow::ensure_folders(root);
  store::Database db(store_path(root), store::Database::Mode::kCreate);
  catalog::Catalog::create_schema(db);
  detect::ReferenceStore::create_schema(db);
  loader::GenericTable::create_schema(db, table_width);
  auto stored = loader::GenericTable::stored_width(db);
  if (stored && *stored != table_width) {
    throw Error(ErrorCode::kConfigValidation,
                "workspace generic table has width " + std::to_string(*stored) +
                    ", requested " + std::to_string(table_width));
  }
}

Workspace::Workspace(const fs::path& root, std::optional<std::size_t> table_width)
    : folders_(fs::absolute(root).lexically_normal()) {
  if (!initialized(root)) {
    throw Error(ErrorCode::kStoreUnavailable,
                "workspace not initialized: " + root.string());
  }
  workflow::ensure_folders(root);
  db_ = std::make_unique<store::Database>(store_path(root),
                                          store::Database::Mode::kOpenExisting);
  auto stored = loader::GenericTable::stored_width(*db_);
  if (!stored) {
    throw Error(ErrorCode::kStoreUnavailable, "generic table missing in " +
                                                  store_path(root).string());
  }
  catalog_ = std::make_unique<catalog::Catalog>(*db_);
  references_ = std::make_unique<detect::ReferenceStore>(*db_);
  table_ = std::make_unique<loader::GenericTable>(*db_, table_width.value_or(*stored));
}

}  // namespace flatingest
