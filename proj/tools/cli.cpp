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

#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "flatingest/csv.hpp"
#include "flatingest/detect.hpp"

namespace flatingest::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kAbsentGlyph = "\xE2\x88\x85";  // ∅

std::string escape_field(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string null_text(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : "NULL";
}

void print_log_header(std::ostream& out) {
  out << "SR_NUM\tFIL_TYPE\tFIL_NAME\tFIL_PATH\tFIL_SIZE\tHEADER\tFIL_STATUS"
         "\tDUP_FILE\tROWS_NUM\tCOL_NUM\n";
}

void print_log_row(std::ostream& out, const catalog::LogEntry& e) {
  out << e.sr_num << '\t' << e.fil_type << '\t' << e.fil_name << '\t'
      << e.fil_path << '\t' << e.fil_size << '\t' << catalog::header_text(e.header)
      << '\t' << catalog::to_string(e.fil_status) << '\t'
      << (e.dup_file ? "Y" : "N") << '\t' << null_text(e.rows_num) << '\t'
      << null_text(e.col_num) << '\n';
}

void print_log_entry(std::ostream& out, const catalog::LogEntry& e) {
  out << "SR_NUM=" << e.sr_num << '\n'
      << "FIL_TYPE=" << e.fil_type << '\n'
      << "FIL_NAME=" << e.fil_name << '\n'
      << "FIL_PATH=" << e.fil_path << '\n'
      << "FIL_SIZE=" << e.fil_size << '\n'
      << "HEADER=" << catalog::header_text(e.header) << '\n'
      << "FIL_STATUS=" << catalog::to_string(e.fil_status) << '\n'
      << "DUP_FILE=" << (e.dup_file ? "Y" : "N") << '\n'
      << "ROWS_NUM=" << null_text(e.rows_num) << '\n'
      << "COL_NUM=" << null_text(e.col_num) << '\n'
      << "REJECTS_NUM=" << e.rejects_num << '\n'
      << "CREATED_AT=" << format_iso8601(e.created_at) << '\n'
      << "MODIFIED_AT=" << format_iso8601(e.modified_at) << '\n';
}

struct RunFlags {
  std::string source;
  std::string root;
  std::string config_file;
  std::optional<std::uint64_t> threshold;
  std::optional<std::size_t> critical_column;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> max_file_size;
  bool no_quoted_newlines = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--source", f.source, "Source folder scanned for *.csv");
  cmd->add_option("--root", f.root, "Workspace root (In, InProgress, ...)");
  cmd->add_option("--config", f.config_file, "key=value configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--threshold", f.threshold, "Batch threshold in records")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--critical-column", f.critical_column,
                  "1-based column that must not be null")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", f.workers, "Files processed in parallel")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-file-size", f.max_file_size, "Size limit in bytes")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-quoted-newlines", f.no_quoted_newlines,
                "Reject line breaks inside quoted fields");
}

config::PipelineConfig resolve_config(const RunFlags& f) {
  config::Overrides o;
  if (!f.source.empty()) o.source_dir = f.source;
  if (!f.root.empty()) o.root_dir = f.root;
  o.batch_threshold = f.threshold;
  o.critical_column = f.critical_column;
  o.workers = f.workers;
  o.max_file_size_bytes = f.max_file_size;
  if (f.no_quoted_newlines) o.allow_quoted_newlines = false;
  std::optional<fs::path> file;
  if (!f.config_file.empty()) file = f.config_file;
  return config::load_config(file, o);
}

std::unique_ptr<Workspace> open_workspace(const fs::path& root,
                                          std::optional<std::size_t> width) {
  if (!Workspace::initialized(root)) {
    throw Error(ErrorCode::kStoreUnavailable,
                "workspace " + root.string() + " is not initialized (run init)");
  }
  return std::make_unique<Workspace>(root, width);
}

void report_run(const RunReport& report, std::ostream& out, std::ostream& err) {
  for (const auto& o : report.files) {
    out << format_outcome_line(o) << '\n';
    if (o.final_state != workflow::FileState::archived() && !o.detail.empty()) {
      err << o.fil_name << ": " << o.detail << '\n';
    }
  }
  for (const auto& w : report.warnings) err << w << '\n';
  if (report.fatal_error) err << "fatal: " << *report.fatal_error << '\n';
  out.flush();
}

int cmd_init(const std::string& root, std::size_t width, std::ostream& err) {
  try {
    Workspace::init(root, width);
    Workspace ws(root);
  } catch (const std::exception& e) {
    err << "init failed: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Workspace> ws;
  config::PipelineConfig cfg;
  try {
    cfg = resolve_config(flags);
    ws = open_workspace(cfg.root_dir, cfg.table_width);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFatal;
  }
  auto notifier = make_notifier(cfg.notify_sinks);
  RunReport report = run_pipeline(cfg, *ws, notifier);
  report_run(report, out, err);
  return exit_status(report);
}

int cmd_watch(const RunFlags& flags, int interval, std::ostream& out,
              std::ostream& err) {
  std::unique_ptr<Workspace> ws;
  config::PipelineConfig cfg;
  try {
    cfg = resolve_config(flags);
    ws = open_workspace(cfg.root_dir, cfg.table_width);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFatal;
  }
  auto notifier = make_notifier(cfg.notify_sinks);
  auto& stop = stop_flag();
  while (!stop.load()) {
    RunReport report = run_pipeline(cfg, *ws, notifier, &stop);
    report_run(report, out, err);
    if (report.fatal_error) return kExitFatal;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(interval);
    while (!stop.load() && std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }
  return kExitOk;
}

int cmd_log_list(const std::string& root, const std::string& status, bool dup,
                 const std::string& name, std::ostream& out, std::ostream& err) {
  try {
    auto ws = open_workspace(root, std::nullopt);
    catalog::Filter filter;
    if (!status.empty()) {
      filter.status = catalog::parse_file_status(status);
      if (!filter.status) {
        err << "unknown status '" << status
            << "' (expected COMPLETE, INCOMPLETE or IN_PROGRESS)\n";
        return kExitFatal;
      }
    }
    if (dup) filter.dup_file = true;
    if (!name.empty()) filter.name_substring = name;
    print_log_header(out);
    for (const auto& e : ws->catalog().query(filter)) print_log_row(out, e);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

int cmd_log_show(const std::string& root, std::int64_t sr, std::ostream& out,
                 std::ostream& err) {
  std::unique_ptr<Workspace> ws;
  try {
    ws = open_workspace(root, std::nullopt);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFatal;
  }
  try {
    print_log_entry(out, ws->catalog().entry(sr));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnknownSerial) {
      err << e.what() << '\n';
      return kExitFatal;
    }
    err << "no log entry with SR " << sr << '\n';
    return kExitException;
  }
  return kExitOk;
}

int cmd_parse(const std::string& file, bool no_quoted_newlines,
              std::ostream& out, std::ostream& err) {
  csv::ParseProfile profile;
  profile.allow_quoted_newlines = !no_quoted_newlines;
  bool header_printed = false;
  auto print_header = [&](detect::HeaderStatus h) {
    out << "header: " << detect::to_string(h) << '\n';
    header_printed = true;
  };
  try {
    auto stream = csv::open_record_stream(file, profile);
    while (auto record = stream.next()) {
      if (!header_printed) print_header(detect::detect_header(*record));
      bool first = true;
      for (const auto& f : record->fields) {
        if (!first) out << '\t';
        first = false;
        if (f.is_absent()) {
          out << kAbsentGlyph;
        } else {
          out << escape_field(f.text());
        }
      }
      out << '\n';
    }
    if (!header_printed) print_header(detect::HeaderStatus::kNotPresent);
  } catch (const ParseError& e) {
    if (!header_printed) print_header(detect::HeaderStatus::kNotPresent);
    out.flush();
    err << e.what() << '\n';
    return kExitException;
  } catch (const std::exception& e) {
    out.flush();
    err << e.what() << '\n';
    return kExitException;
  }
  return kExitOk;
}

int cmd_export(const std::string& what, const std::string& root,
               std::ostream& out, std::ostream& err) {
  try {
    auto ws = open_workspace(root, std::nullopt);
    if (what == "catalog") {
      out << catalog::export_csv(ws->catalog().query());
    } else {
      out << ws->table().export_csv();
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

extern "C" void on_stop_signal(int) { stop_flag().store(true); }

}  // namespace

ExitStatus exit_status(const RunReport& report) {
  if (report.fatal_error) return kExitFatal;
  for (const auto& o : report.files) {
    if (o.final_state != workflow::FileState::archived()) return kExitException;
  }
  return kExitOk;
}

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

void install_signal_handlers() {
  struct sigaction sa {};
  sa.sa_handler = on_stop_signal;
  sigemptyset(&sa.sa_mask);
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Automated ingestion of complex CSV flat files"};
  app.name("flatingest");
  app.require_subcommand(1);

  std::string init_root;
  std::size_t init_width = loader::kDefaultTableWidth;
  auto* init = app.add_subcommand("init", "Create workspace folders and stores");
  init->add_option("--root", init_root, "Workspace root")->required();
  init->add_option("--table-width", init_width, "Generic table width")
      ->check(CLI::PositiveNumber);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Process the source folder once");
  add_run_flags(run, run_flags);

  RunFlags watch_flags;
  int interval = 30;
  auto* watch = app.add_subcommand("watch", "Poll the source folder until interrupted");
  add_run_flags(watch, watch_flags);
  watch->add_option("--interval", interval, "Seconds between sweeps")
      ->check(CLI::Range(1, 86400));

  auto* log = app.add_subcommand("log", "Inspect the audit log");
  log->require_subcommand(1);
  log->fallthrough();
  std::string log_root;
  log->add_option("--root", log_root, "Workspace root")->required();
  std::string list_status;
  std::string list_name;
  bool list_dup = false;
  auto* list = log->add_subcommand("list", "List log entries");
  list->add_option("--status", list_status, "COMPLETE, INCOMPLETE or IN_PROGRESS");
  list->add_flag("--dup", list_dup, "Only duplicate files");
  list->add_option("--name", list_name, "File name substring");
  std::int64_t show_sr = 0;
  auto* show = log->add_subcommand("show", "Show every field of one entry");
  show->add_option("SR", show_sr, "Log serial")->required();

  std::string parse_file;
  bool parse_strict = false;
  auto* parse = app.add_subcommand("parse", "Tokenize one file and print records");
  parse->add_option("FILE", parse_file, "CSV file")->required();
  parse->add_flag("--no-quoted-newlines", parse_strict,
                  "Reject line breaks inside quoted fields");

  std::string export_what;
  std::string export_root;
  auto* exp = app.add_subcommand("export", "Write catalog or generic table as CSV");
  exp->add_option("WHAT", export_what, "catalog or table")
      ->required()
      ->check(CLI::IsMember({"catalog", "table"}));
  exp->add_option("--root", export_root, "Workspace root")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitFatal;
  }

  if (*init) return cmd_init(init_root, init_width, err);
  if (*run) return cmd_run(run_flags, out, err);
  if (*watch) return cmd_watch(watch_flags, interval, out, err);
  if (*log) {
    if (*list) return cmd_log_list(log_root, list_status, list_dup, list_name, out, err);
    return cmd_log_show(log_root, show_sr, out, err);
  }
  if (*parse) return cmd_parse(parse_file, parse_strict, out, err);
  return cmd_export(export_what, export_root, out, err);
}

}  // namespace flatingest::cli
