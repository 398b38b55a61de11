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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flatingest/config.hpp"
#include "flatingest/notify.hpp"
#include "flatingest/workflow.hpp"
#include "flatingest/workspace.hpp"

namespace flatingest {

struct FileOutcome {
  std::int64_t sr_num = 0;
  std::string fil_name;
  workflow::FileState final_state = workflow::FileState::received();
  std::optional<std::int64_t> rows;
  std::optional<std::int64_t> cols;
  std::int64_t rejects = 0;
  std::string detail;
};

struct RunReport {
  std::vector<FileOutcome> files;
  /// Serials whose interrupted state was repaired before the sweep.
  std::vector<std::int64_t> recovered;
  std::optional<std::string> fatal_error;
  /// Failed notification deliveries; they never change a file's outcome.
  std::vector<std::string> warnings;
};

/// `<name> <final-state> rows=<r> cols=<c>`; null counts print as NULL.
std::string format_outcome_line(const FileOutcome& outcome);

/// Builds file/command sinks from their specs.
notify::Notifier make_notifier(const std::vector<config::SinkSpec>& specs);

class Pipeline {
 public:
  Pipeline(config::PipelineConfig config, Workspace& workspace,
           notify::Notifier& notifier);

  /// Repairs a previous interrupted run, then processes every candidate in
  /// the source folder. Stops between files once `*stop` is set. A store
  /// failure ends the sweep and is reported in `fatal_error`.
  RunReport run(const std::atomic<bool>* stop = nullptr);

  /// Runs one source file through all three stages. Throws only for store
  /// failures.
  FileOutcome process_file(const std::filesystem::path& source_file);

  /// Rolls back pending loads and settles entries left IN_PROGRESS.
  std::vector<std::int64_t> recover();

 private:
  FileOutcome finish(workflow::ManagedFile& file, const std::string& name,
                     const workflow::FileState& to,
                     const catalog::EntryPatch& patch, notify::Event event,
                     const std::string& detail);

  void send(const notify::Notification& n);

  config::PipelineConfig config_;
  Workspace& ws_;
  notify::Notifier& notifier_;
  std::mutex warnings_mutex_;
  std::vector<std::string> warnings_;
};

RunReport run_pipeline(const config::PipelineConfig& config,
                       Workspace& workspace, notify::Notifier& notifier,
                       const std::atomic<bool>* stop = nullptr);

}  // namespace flatingest
