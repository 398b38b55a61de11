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

#include "flatingest/pipeline.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

namespace flatingest {
namespace fs = std::filesystem;
using workflow::ExceptionReason;
using workflow::FileState;

namespace {

std::string count_text(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : "NULL";
}

bool inside(const fs::path& file, const fs::path& folder) {
  std::error_code ec;
  return fs::equivalent(file.parent_path(), folder, ec);
}

}  // namespace

std::string format_outcome_line(const FileOutcome& o) {
  return o.fil_name + " " + o.final_state.to_string() +
         " rows=" + count_text(o.rows) + " cols=" + count_text(o.cols);
}

notify::Notifier make_notifier(const std::vector<config::SinkSpec>& specs) {
  notify::Notifier notifier;
  for (const auto& spec : specs) {
    if (spec.kind == config::SinkSpec::Kind::kFile) {
      notifier.add_sink(std::make_unique<notify::FileSink>(spec.target));
    } else {
      notifier.add_sink(std::make_unique<notify::CommandSink>(spec.target));
    }
  }
  return notifier;
}

Pipeline::Pipeline(config::PipelineConfig config, Workspace& workspace,
                   notify::Notifier& notifier)
    : config_(std::move(config)), ws_(workspace), notifier_(notifier) {}

void Pipeline::send(const notify::Notification& n) {
  for (const auto& r : notifier_.notify(n).results) {
    if (r.ok) continue;
    std::lock_guard<std::mutex> lock(warnings_mutex_);
    warnings_.push_back("notify: " + r.sink + " failed for " + n.fil_name + ": " +
                        r.error);
  }
}

FileOutcome Pipeline::finish(workflow::ManagedFile& file, const std::string& name,
                             const FileState& to,
                             const catalog::EntryPatch& patch,
                             notify::Event event, const std::string& detail) {
  file = workflow::transition(file, to, ws_.folders(), ws_.catalog(), patch);
  FileOutcome outcome;
  outcome.sr_num = file.sr_num;
  outcome.fil_name = name;
  outcome.final_state = file.state;
  outcome.rows = patch.rows_num;
  outcome.cols = patch.col_num;
  outcome.rejects = patch.rejects_num.value_or(0);
  outcome.detail = detail;
  send({event, file.sr_num, name, detail, now_utc()});
  return outcome;
}

FileOutcome Pipeline::process_file(const fs::path& source_file) {
  using catalog::FileStatus;
  const std::string name = source_file.filename().string();
  auto& catalog = ws_.catalog();
  auto& refs = ws_.references();
  auto& table = ws_.table();

  std::error_code ec;
  auto size = fs::file_size(source_file, ec);
  if (ec) size = 0;
  workflow::ManagedFile file;
  file.sr_num = catalog.append_entry(name, source_file.string(),
                                     static_cast<std::int64_t>(size));
  file.current_path = source_file;
  file.size_bytes = size;

  catalog::EntryPatch incomplete;
  incomplete.fil_status = FileStatus::kIncomplete;

  try {
    if (workflow::guard_size(source_file, config_.max_file_size_bytes) ==
        workflow::SizeCheck::kTooLarge) {
      return finish(file, name, FileState::exception(ExceptionReason::kTooLarge),
                    incomplete, notify::Event::kFailure,
                    "file size " + std::to_string(size) + " exceeds limit " +
                        std::to_string(config_.max_file_size_bytes));
    }

    // Stage 1: header check. A parse error here is not terminal; stage 3
    // reads the same bytes and reports it.
    csv::ParseProfile profile;
    profile.allow_quoted_newlines = config_.allow_quoted_newlines;
    std::optional<detect::FileSample> sample;
    try {
      sample = detect::sample_file(file.current_path, profile);
    } catch (const ParseError&) {
    }
    const auto header =
        sample ? sample->header : detect::HeaderStatus::kNotPresent;
    {
      catalog::EntryPatch patch;
      patch.header = header;
      file = workflow::transition(file, FileState::in(), ws_.folders(), catalog,
                                  patch);
    }

    // Stage 2: duplicate and critical-column checks.
    if (sample) {
      auto fp = detect::fingerprint_file(sample->data_records);
      auto duplicate = [&](const std::string& detail) {
        catalog::EntryPatch patch = incomplete;
        patch.dup_file = true;
        return finish(file, name,
                      FileState::exception(ExceptionReason::kDuplicate), patch,
                      notify::Event::kDuplicate, detail);
      };
      if (auto owner = refs.owner_of(fp)) {
        return duplicate("first 10 data rows match SR " + std::to_string(*owner));
      }
      if (auto v = detect::validate_critical(sample->data_records,
                                             {config_.critical_column})) {
        return finish(file, name,
                      FileState::exception(ExceptionReason::kCriticalNull),
                      incomplete, notify::Event::kFailure,
                      "null critical column " +
                          std::to_string(*config_.critical_column) +
                          " in data record " + std::to_string(v->record_ordinal));
      }
      try {
        refs.register_fingerprint(fp, file.sr_num);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDuplicateDigest) throw;
        return duplicate("first 10 data rows registered concurrently");
      }
    }
    file = workflow::transition(file, FileState::in_progress(), ws_.folders(),
                                catalog);

    // Stage 3: parse and load.
    table.begin_load(file.sr_num);
    std::optional<ExceptionReason> failure;
    std::string failure_detail;
    loader::LoadResult result;
    try {
      auto stream = csv::open_record_stream(file.current_path, profile);
      auto first = stream.next();
      if (!first) {
        failure = ExceptionReason::kParseFailure;
        failure_detail = "file contains no records";
      } else {
        auto col_num = loader::detect_column_count(*first, table.width());
        loader::BatchBuffer buffer(table, config_.batch_threshold, file.sr_num,
                                   col_num, table.width());
        if (header == detect::HeaderStatus::kNotPresent) {
          buffer.buffer_record(*first);
        }
        while (auto record = stream.next()) buffer.buffer_record(*record);
        ws_.db().transaction([&] {
          result = buffer.finalize();
          table.end_load(file.sr_num);
          catalog::EntryPatch patch;
          patch.fil_status = FileStatus::kComplete;
          patch.rows_num = result.rows_loaded;
          patch.col_num = static_cast<std::int64_t>(result.col_num);
          patch.rejects_num = result.rejects;
          catalog.update_entry(file.sr_num, patch);
        });
      }
    } catch (const ParseError& e) {
      failure = e.code() == ErrorCode::kEncoding ? ExceptionReason::kEncoding
                                                  : ExceptionReason::kParseFailure;
      failure_detail = e.what();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kStoreUnavailable) throw;
      failure = ExceptionReason::kParseFailure;
      failure_detail = e.what();
    }

    if (failure) {
      ws_.db().transaction([&] {
        loader::abort_load(table, file.sr_num);
        refs.unregister(file.sr_num);
        table.end_load(file.sr_num);
      });
      return finish(file, name, FileState::exception(*failure), incomplete,
                    notify::Event::kFailure, failure_detail);
    }

    catalog::EntryPatch done;
    done.rows_num = result.rows_loaded;
    done.col_num = static_cast<std::int64_t>(result.col_num);
    done.rejects_num = result.rejects;
    std::string detail = "rows=" + std::to_string(result.rows_loaded) +
                         " cols=" + std::to_string(result.col_num);
    if (result.rejects > 0) detail += " rejects=" + std::to_string(result.rejects);
    return finish(file, name, FileState::archived(), done,
                  notify::Event::kSuccess, detail);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kStoreUnavailable) throw;
    // A move failed; the file stays where it is and recovery settles it.
    FileOutcome outcome;
    outcome.sr_num = file.sr_num;
    outcome.fil_name = name;
    outcome.final_state = file.state;
    outcome.detail = e.what();
    return outcome;
  }
}

std::vector<std::int64_t> Pipeline::recover() {
  using catalog::FileStatus;
  auto& catalog = ws_.catalog();
  auto& refs = ws_.references();
  const auto& folders = ws_.folders();
  std::vector<std::int64_t> repaired;

  for (std::int64_t sr : ws_.table().recover_pending()) refs.unregister(sr);

  for (const auto& e : catalog.query({FileStatus::kInProgress, {}, {}})) {
    repaired.push_back(e.sr_num);
    ws_.db().transaction([&] {
      loader::abort_load(ws_.table(), e.sr_num);
      refs.unregister(e.sr_num);
    });
    fs::path path = e.fil_path;
    bool managed = inside(path, folders.in) || inside(path, folders.in_progress);
    catalog::EntryPatch patch;
    patch.fil_status = FileStatus::kIncomplete;
    std::string detail = "interrupted run";
    if (managed && fs::exists(path)) {
      // Interrupted files go to Exception whatever stage they were in.
      fs::path dest = folders.exception / path.filename();
      if (fs::exists(dest)) {
        dest = folders.exception / (path.stem().string() + "_" +
                                    std::to_string(e.sr_num) +
                                    path.extension().string());
      }
      workflow::move_file(path, dest);
      patch.fil_path = dest.string();
    }
    catalog.update_entry(e.sr_num, patch);
    send({notify::Event::kFailure, e.sr_num, e.fil_name, detail, now_utc()});
  }

  for (const auto& e : catalog.query({FileStatus::kComplete, {}, {}})) {
    fs::path path = e.fil_path;
    if (inside(path, folders.archive) || !fs::exists(path)) continue;
    repaired.push_back(e.sr_num);
    fs::path dest = folders.archive / path.filename();
    if (fs::exists(dest)) {
      dest = folders.archive / (path.stem().string() + "_" +
                                std::to_string(e.sr_num) +
                                path.extension().string());
    }
    workflow::move_file(path, dest);
    catalog::EntryPatch patch;
    patch.fil_path = dest.string();
    catalog.update_entry(e.sr_num, patch);
    send({notify::Event::kSuccess, e.sr_num, e.fil_name,
                     "rows=" + count_text(e.rows_num) + " cols=" + count_text(e.col_num),
                     now_utc()});
  }
  return repaired;
}

RunReport Pipeline::run(const std::atomic<bool>* stop) {
  RunReport report;
  auto stopped = [stop] { return stop != nullptr && stop->load(); };
  try {
    report.recovered = recover();
    auto candidates = workflow::scan_source(fs::absolute(config_.source_dir));

    std::mutex report_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> fatal{false};
    auto worker = [&] {
      while (!stopped() && !fatal.load()) {
        std::size_t i = next.fetch_add(1);
        if (i >= candidates.size()) return;
        try {
          FileOutcome o = process_file(candidates[i]);
          std::lock_guard<std::mutex> lock(report_mutex);
          report.files.push_back(std::move(o));
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(report_mutex);
          if (!report.fatal_error) report.fatal_error = e.what();
          fatal = true;
        }
      }
    };

    const std::size_t workers =
        std::min<std::size_t>(config_.workers, std::max<std::size_t>(candidates.size(), 1));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
  } catch (const std::exception& e) {
    report.fatal_error = e.what();
  }
  std::sort(report.files.begin(), report.files.end(),
            [](const FileOutcome& a, const FileOutcome& b) {
              return a.sr_num < b.sr_num;
            });
  {
    std::lock_guard<std::mutex> lock(warnings_mutex_);
    report.warnings = std::move(warnings_);
    warnings_.clear();
  }
  return report;
}

RunReport run_pipeline(const config::PipelineConfig& config,
                       Workspace& workspace, notify::Notifier& notifier,
                       const std::atomic<bool>* stop) {
  Pipeline pipeline(config, workspace, notifier);
  return pipeline.run(stop);
}

}  // namespace flatingest
