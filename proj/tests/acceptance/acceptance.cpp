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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "flatingest/csv.hpp"
#include "flatingest/error.hpp"
#include "flatingest/loader.hpp"
#include "flatingest/notify.hpp"
#include "flatingest/pipeline.hpp"
#include "flatingest/workspace.hpp"
#include "support/csv_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/temp_dir.hpp"

namespace {

namespace fs = std::filesystem;
using namespace flatingest;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kFig1ParseBudgetMs = 1.0;
constexpr double kCircuitsBudgetS = 5.0;
constexpr double kThroughputBudgetS = 60.0;
constexpr std::int64_t kRssGrowthCapBytes = 64LL << 20;
constexpr std::int64_t kRssScalingSlackBytes = 16LL << 20;
constexpr int kPropertyCases = 10000;

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& title, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("criterion %2d %s: %s (%s)\n", n, v.pass ? "PASS" : "FAIL", title.c_str(),
              v.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<notify::Notification> read_notifications(const fs::path& p) {
  std::vector<notify::Notification> out;
  std::istringstream in(testing::read_file(p));
  for (std::string line; std::getline(in, line);) {
    auto n = notify::parse_notification(line);
    if (!n) throw std::runtime_error("unparseable notification: " + line);
    if (notify::serialize(*n) != line) throw std::runtime_error("notification not bit-exact");
    out.push_back(*n);
  }
  return out;
}

/// Workspace plus source folder and a file notification sink.
struct Rig {
  testing::TempDir dir;
  fs::path source = dir / "source";
  fs::path root = dir / "root";
  fs::path notify_log = dir / "notify.log";
  std::unique_ptr<Workspace> ws;
  notify::Notifier notifier;
  config::PipelineConfig cfg;

  Rig() {
    fs::create_directories(source);
    Workspace::init(root);
    ws = std::make_unique<Workspace>(root);
    notifier.add_sink(std::make_unique<notify::FileSink>(notify_log));
    cfg.source_dir = source;
    cfg.root_dir = root;
  }
  RunReport run() {
    Pipeline p(cfg, *ws, notifier);
    return p.run();
  }
};

Verdict expect_single(const RunReport& r) {
  if (r.fatal_error) return {false, "fatal: " + *r.fatal_error};
  if (r.files.size() != 1) return {false, std::to_string(r.files.size()) + " outcomes"};
  return {true, ""};
}

// /proc/self/status VmHWM / VmRSS in bytes.
std::int64_t proc_status_kb(const char* key) {
  std::ifstream in("/proc/self/status");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key, 0) == 0) return std::stoll(line.substr(std::string(key).size())) * 1024;
  }
  return -1;
}

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  out << "5";
  return static_cast<bool>(out);
}

void write_wide_file(const fs::path& p, std::size_t rows) {
  std::ofstream out(p, std::ios::binary);
  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    line.clear();
    line += std::to_string(i);
    line += ",\"ACME, Inc.\",KY/HCGS/";
    line += std::to_string(100000 + i % 900000);
    line += ",7/24/2008 0:00:00,\"said \"\"hi\"\"\",";
    line += std::to_string(i % 1000);
    line += ".25,,BellSouth,0614,\"multi\r\nline\"\r\n";
    out << line;
  }
}

}  // namespace

int main() {
  // 1. Sample from the format introduction.
  report(1, "two-record sample with quoted line break", [] {
    const std::string bytes = "\"aaa\",\"b\r\nbb\",\"ccc\"\r\nzzz,yyy,xxx";
    using csv::Field;
    const std::vector<std::vector<Field>> want = {
        {Field::present("aaa"), Field::present("b\r\nbb"), Field::present("ccc")},
        {Field::present("zzz"), Field::present("yyy"), Field::present("xxx")}};
    std::vector<double> ms;
    std::vector<csv::Record> got;
    for (int i = 0; i < 201; ++i) {
      auto t = Clock::now();
      got = csv::parse_all(bytes);
      ms.push_back(seconds_since(t) * 1000.0);
    }
    double cold = ms.front();
    std::sort(ms.begin(), ms.end());
    double median = ms[ms.size() / 2];
    bool equal = got.size() == 2 && got[0].fields == want[0] && got[1].fields == want[1];
    // The typeset variant with spaces after delimiters keeps them as data.
    auto spaced = csv::parse_all("\"aaa\", \"b \r\nbb\", \"ccc\" \r\nzzz, yyy, xxx");
    bool spaced_ok = spaced.size() == 2 && spaced[0].size() == 3 && spaced[1].size() == 3;
    return Verdict{equal && median < kFig1ParseBudgetMs && cold < kFig1ParseBudgetMs && spaced_ok,
                   "records=" + std::to_string(got.size()) + " exact=" + (equal ? "yes" : "no") +
                       " cold=" + fmt("%.3f", cold) + "ms median=" + fmt("%.4f", median) +
                       "ms budget<1ms spaced-variant=" + (spaced_ok ? "2x3" : "wrong")};
  });

  Rig rig;
  std::string circuits;
  std::int64_t circuits_sr = 0;

  // 2. Headered 12-column file.
  report(2, "tbl_Circuits.csv archived with 7958 rows x 12 cols", [&] {
    circuits = testing::circuit_file(7958, 794270);
    testing::write_file(rig.source / "tbl_Circuits.csv", circuits);
    auto t = Clock::now();
    auto r = rig.run();
    double s = seconds_since(t);
    if (auto v = expect_single(r); !v.pass) return v;
    const auto& o = r.files[0];
    circuits_sr = o.sr_num;
    auto e = rig.ws->catalog().entry(o.sr_num);
    auto table_rows = rig.ws->table().count_rows(o.sr_num);
    bool ok = o.final_state == workflow::FileState::archived() && e.fil_size == 794270 &&
              e.header == detect::HeaderStatus::kPresent &&
              e.fil_status == catalog::FileStatus::kComplete && !e.dup_file &&
              e.rows_num == 7958 && e.col_num == 12 && table_rows == 7958 && s < kCircuitsBudgetS;
    return Verdict{ok, "state=" + o.final_state.to_string() + " size=" +
                           std::to_string(e.fil_size) + " HEADER=" +
                           std::string(catalog::header_text(e.header)) + " FIL_STATUS=" +
                           std::string(catalog::to_string(e.fil_status)) + " DUP_FILE=" +
                           (e.dup_file ? "Y" : "N") + " ROWS_NUM=" +
                           std::to_string(e.rows_num.value_or(-1)) + " COL_NUM=" +
                           std::to_string(e.col_num.value_or(-1)) + " table_rows=" +
                           std::to_string(table_rows) + " elapsed=" + fmt("%.2f", s) +
                           "s budget<5s"};
  });

  // 3. Byte-identical copy under another name.
  report(3, "tbl_Circuits111.csv rejected as duplicate", [&] {
    auto before = rig.ws->table().count_rows();
    testing::write_file(rig.source / "tbl_Circuits111.csv", circuits);
    auto r = rig.run();
    if (auto v = expect_single(r); !v.pass) return v;
    const auto& o = r.files[0];
    auto e = rig.ws->catalog().entry(o.sr_num);
    bool in_exception = fs::path(e.fil_path).parent_path() == rig.ws->folders().exception &&
                        fs::exists(rig.ws->folders().exception / "tbl_Circuits111.csv");
    auto added = rig.ws->table().count_rows() - before;
    bool ok = o.final_state ==
                  workflow::FileState::exception(workflow::ExceptionReason::kDuplicate) &&
              e.fil_status == catalog::FileStatus::kIncomplete && e.dup_file && !e.rows_num &&
              !e.col_num && in_exception && added == 0 && o.sr_num == circuits_sr + 1;
    return Verdict{ok, "state=" + o.final_state.to_string() + " FIL_STATUS=" +
                           std::string(catalog::to_string(e.fil_status)) + " DUP_FILE=" +
                           (e.dup_file ? "Y" : "N") + " ROWS_NUM=" +
                           (e.rows_num ? std::to_string(*e.rows_num) : "NULL") + " COL_NUM=" +
                           (e.col_num ? std::to_string(*e.col_num) : "NULL") + " in Exception/=" +
                           (in_exception ? "yes" : "no") + " new_rows=" + std::to_string(added)};
  });

  // 4. Headerless 48-column file.
  report(4, "headerless 48-col file loads all 564 rows", [&] {
    std::string bytes = testing::cdr_file(564, 48, 164173);
    testing::write_file(rig.source / "CDR_20140614.csv", bytes);
    auto first_row = csv::parse_all(bytes.substr(0, bytes.find("\r\n")))[0];
    auto r = rig.run();
    if (auto v = expect_single(r); !v.pass) return v;
    const auto& o = r.files[0];
    auto e = rig.ws->catalog().entry(o.sr_num);
    auto rows = rig.ws->table().rows_for(o.sr_num);
    bool first_is_data = !rows.empty() && rows[0].cells[0] == first_row.fields[0].value() &&
                         rows[0].cells[47] == first_row.fields[47].value();
    bool ok = o.final_state == workflow::FileState::archived() &&
              e.fil_status == catalog::FileStatus::kComplete &&
              e.header == detect::HeaderStatus::kNotPresent && e.rows_num == 564 &&
              e.col_num == 48 && rows.size() == 564 && first_is_data && e.fil_size == 164173;
    return Verdict{ok, "FIL_STATUS=" + std::string(catalog::to_string(e.fil_status)) +
                           " HEADER=" + std::string(catalog::header_text(e.header)) +
                           " ROWS_NUM=" + std::to_string(e.rows_num.value_or(-1)) +
                           " COL_NUM=" + std::to_string(e.col_num.value_or(-1)) +
                           " table_rows=" + std::to_string(rows.size()) +
                           " first_row_loaded=" + (first_is_data ? "yes" : "no")};
  });

  // 5. Canonical writer round trip.
  report(5, "parse(write_canonical(r)) == r", [] {
    testing::CsvGenerator gen(20260001);
    int fails = 0;
    std::size_t fields = 0;
    for (int i = 0; i < kPropertyCases; ++i) {
      auto records = gen.records();
      auto back = csv::parse_all(csv::write_canonical(records));
      bool same = back.size() == records.size();
      for (std::size_t k = 0; same && k < records.size(); ++k) {
        same = back[k].fields == records[k].fields;
        fields += records[k].size();
      }
      fails += !same;
    }
    return Verdict{fails == 0, std::to_string(kPropertyCases) + " record lists, " +
                                   std::to_string(fields) + " fields, failures=" +
                                   std::to_string(fails)};
  });

  // 6. Streaming tokenizer against the reference state machine.
  report(6, "streaming tokenizer agrees with oracle", [] {
    testing::CsvGenerator gen(20260002);
    int fails = 0;
    std::size_t records = 0;
    for (int i = 0; i < kPropertyCases; ++i) {
      std::string text = gen.valid_csv();
      auto expected = testing::oracle_parse(text);
      std::istringstream in(text);
      csv::RecordStream stream(in, {}, gen.uniform(1, 64));
      std::size_t k = 0;
      bool same = true;
      while (auto r = stream.next()) {
        if (k >= expected.size() || r->size() != expected[k].fields.size() ||
            r->source_line != expected[k].line) {
          same = false;
          break;
        }
        for (std::size_t f = 0; f < r->size(); ++f) {
          if (r->fields[f].value() != expected[k].fields[f]) same = false;
        }
        ++k;
      }
      same = same && k == expected.size();
      records += expected.size();
      fails += !same;
    }
    return Verdict{fails == 0, std::to_string(kPropertyCases) + " inputs, " +
                                   std::to_string(records) + " records, mismatches=" +
                                   std::to_string(fails)};
  });

  // 7. Flush count law against the real table.
  report(7, "flush_count == ceil(R/T), table gains R rows", [] {
    testing::TempDir dir;
    Workspace::init(dir / "root");
    Workspace ws(dir / "root");
    int fails = 0;
    int cases = 0;
    std::int64_t sr = 0;
    std::string first_bad;
    for (std::size_t t : {1u, 7u, 1000u}) {
      for (std::size_t rows : {0u, 1u, 6u, 7u, 8u, 999u, 1000u, 1001u, 7958u}) {
        ++sr;
        auto before = ws.table().count_rows();
        loader::BatchBuffer buf(ws.table(), t, sr, 3, ws.table().width());
        csv::Record rec;
        for (std::size_t i = 0; i < rows; ++i) {
          rec.fields = {csv::Field::present(std::to_string(i)), csv::Field::present("x"),
                        csv::Field::absent()};
          buf.buffer_record(rec);
        }
        auto result = buf.finalize();
        auto gained = ws.table().count_rows() - before;
        bool ok = buf.flush_count() == (rows + t - 1) / t &&
                  gained == static_cast<std::int64_t>(rows) &&
                  result.rows_loaded == static_cast<std::int64_t>(rows);
        ++cases;
        if (!ok) {
          ++fails;
          if (first_bad.empty()) {
            first_bad = " first failure T=" + std::to_string(t) + " R=" + std::to_string(rows);
          }
        }
      }
    }
    return Verdict{fails == 0, std::to_string(cases) + " (T,R) cases, failures=" +
                                   std::to_string(fails) + first_bad};
  });

  // 8. Size limit boundary with real files of exactly 262,144,000 and
  // 262,144,001 bytes.
  report(8, "size guard at 262,144,000 bytes", [] {
    Rig r8;
    constexpr std::uint64_t kLimit = 262144000;
    {
      std::ofstream out(r8.source / "a_limit.csv", std::ios::binary);
      const std::string body(65000, 'p');
      std::uint64_t written = 0;
      for (std::uint64_t i = 0; written < kLimit; ++i) {
        std::string line = std::to_string(i) + ",\"" + body + "\"\r\n";
        if (written + line.size() > kLimit - 64) {
          std::string tail = std::to_string(i) + ",\"";
          std::size_t pad = kLimit - written - tail.size() - 3;
          line = tail + std::string(pad, 'q') + "\"\r\n";
        }
        out << line;
        written += line.size();
      }
    }
    fs::copy_file(r8.source / "a_limit.csv", r8.source / "b_over.csv");
    { std::ofstream(r8.source / "b_over.csv", std::ios::binary | std::ios::app) << "\n"; }
    auto size_a = fs::file_size(r8.source / "a_limit.csv");
    auto size_b = fs::file_size(r8.source / "b_over.csv");
    auto r = r8.run();
    if (r.files.size() != 2) return Verdict{false, std::to_string(r.files.size()) + " outcomes"};
    const auto& ok_file = r.files[0];
    const auto& big = r.files[1];
    auto big_rows = r8.ws->table().count_rows(big.sr_num);
    bool in_exception = fs::exists(r8.ws->folders().exception / "b_over.csv");
    bool pass = size_a == kLimit && size_b == kLimit + 1 &&
                ok_file.final_state == workflow::FileState::archived() &&
                big.final_state ==
                    workflow::FileState::exception(workflow::ExceptionReason::kTooLarge) &&
                big_rows == 0 && in_exception;
    return Verdict{pass, std::to_string(size_a) + " bytes -> " +
                             ok_file.final_state.to_string() + " rows=" +
                             std::to_string(ok_file.rows.value_or(-1)) + "; " +
                             std::to_string(size_b) + " bytes -> " +
                             big.final_state.to_string() + " rows_loaded=" +
                             std::to_string(big_rows)};
  });

  // 9. Mid-file failure after several flushes.
  report(9, "mid-file parse failure rolls back all rows", [] {
    Rig r9;
    r9.cfg.batch_threshold = 7;
    // Counts every row ever inserted, including rows later removed.
    r9.ws->db().exec(
        "CREATE TABLE inserted_audit (source_sr INTEGER);"
        "CREATE TRIGGER audit_rows AFTER INSERT ON generic_rows BEGIN "
        "INSERT INTO inserted_audit VALUES (NEW.source_sr); END;");
    std::string text;
    for (int i = 0; i < 30; ++i) text += std::to_string(i) + ",ok\r\n";
    text += "30,\"never closed\r\n31,x\r\n";
    testing::write_file(r9.source / "broken.csv", text);
    auto r = r9.run();
    if (auto v = expect_single(r); !v.pass) return v;
    const auto& o = r.files[0];
    auto stmt = r9.ws->db().prepare("SELECT COUNT(*) FROM inserted_audit WHERE source_sr = ?");
    stmt.bind(1, o.sr_num);
    stmt.step();
    auto ever = stmt.column_int64(0);
    auto flushes = ever / 7;
    auto remaining = r9.ws->table().count_rows(o.sr_num);
    auto e = r9.ws->catalog().entry(o.sr_num);
    bool ok = flushes >= 2 && remaining == 0 &&
              e.fil_status == catalog::FileStatus::kIncomplete &&
              o.final_state ==
                  workflow::FileState::exception(workflow::ExceptionReason::kParseFailure);
    return Verdict{ok, "flushed_before_failure=" + std::to_string(ever) + " rows (" +
                           std::to_string(flushes) + " flushes) remaining=" +
                           std::to_string(remaining) + " FIL_STATUS=" +
                           std::string(catalog::to_string(e.fil_status)) + " state=" +
                           o.final_state.to_string()};
  });

  // 10. One million rows end to end with bounded memory.
  report(10, "1,000,000 x 10 file under 60 s, memory bounded", [] {
    Rig small;
    Rig large;
    write_wide_file(small.source / "small.csv", 100000);
    write_wide_file(large.source / "million.csv", 1000000);
    auto file_bytes = static_cast<std::int64_t>(fs::file_size(large.source / "million.csv"));

    // The peak counter must really reset, or the growth figures are void.
    {
      std::vector<char> ballast(128u << 20, 1);
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < ballast.size(); i += 4096) sum += ballast[i];
      if (sum == 0) return Verdict{false, "ballast not touched"};
    }
    auto hwm_with_ballast = proc_status_kb("VmHWM:");
    bool can_reset = reset_peak_rss() &&
                     proc_status_kb("VmHWM:") < hwm_with_ballast - (64LL << 20);
    auto base_small = proc_status_kb("VmRSS:");
    small.run();
    auto growth_small = proc_status_kb("VmHWM:") - base_small;

    reset_peak_rss();
    auto base = proc_status_kb("VmRSS:");
    auto t = Clock::now();
    auto r = large.run();
    double s = seconds_since(t);
    auto growth = proc_status_kb("VmHWM:") - base;
    if (auto v = expect_single(r); !v.pass) return v;
    const auto& o = r.files[0];
    bool ok = can_reset && o.final_state == workflow::FileState::archived() &&
              o.rows == 1000000 && o.cols == 10 && s < kThroughputBudgetS &&
              growth < kRssGrowthCapBytes && growth < file_bytes / 4 &&
              growth - growth_small < kRssScalingSlackBytes;
    return Verdict{ok, "rows=" + std::to_string(o.rows.value_or(-1)) + " cols=" +
                           std::to_string(o.cols.value_or(-1)) + " file=" +
                           std::to_string(file_bytes >> 20) + "MiB elapsed=" + fmt("%.1f", s) +
                           "s budget<60s peak_reset=" + (can_reset ? "ok" : "broken") + " peak_rss_growth=" + std::to_string(growth >> 20) +
                           "MiB (100k-row file: " + std::to_string(growth_small >> 20) +
                           "MiB) cap<64MiB"};
  });

  // 11. Notifications of criteria 2-4.
  report(11, "SUCCESS, DUPLICATE, SUCCESS notifications", [&] {
    auto ns = read_notifications(rig.notify_log);
    std::vector<notify::Event> want = {notify::Event::kSuccess, notify::Event::kDuplicate,
                                       notify::Event::kSuccess};
    std::vector<notify::Event> got;
    std::string summary;
    for (const auto& n : ns) {
      got.push_back(n.event);
      summary += std::string(summary.empty() ? "" : ", ") + std::string(notify::to_string(n.event)) +
                 " " + n.fil_name;
    }
    bool ok = got == want && ns[0].fil_name == "tbl_Circuits.csv" &&
              ns[0].detail == "rows=7958 cols=12" && ns[1].fil_name == "tbl_Circuits111.csv" &&
              ns[2].detail == "rows=564 cols=48";
    return Verdict{ok, std::to_string(ns.size()) + " lines, round-trip exact: " + summary};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
