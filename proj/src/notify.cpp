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

#include "flatingest/notify.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

#include "flatingest/error.hpp"

extern char** environ;

namespace flatingest::notify {
namespace {

std::mutex& path_mutex(const std::filesystem::path& path) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::mutex> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  return registry[std::filesystem::absolute(path).lexically_normal().string()];
}

std::string escape_detail(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string shell_quote(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out += "'";
  return out;
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

}  // namespace

std::string_view to_string(Event event) {
  switch (event) {
    case Event::kSuccess: return "SUCCESS";
    case Event::kDuplicate: return "DUPLICATE";
    case Event::kFailure: return "FAILURE";
  }
  return "";
}

std::optional<Event> parse_event(std::string_view text) {
  if (text == "SUCCESS") return Event::kSuccess;
  if (text == "DUPLICATE") return Event::kDuplicate;
  if (text == "FAILURE") return Event::kFailure;
  return std::nullopt;
}

std::string serialize(const Notification& n) {
  std::string out = "event=";
  out += to_string(n.event);
  out += " sr=" + std::to_string(n.sr_num);
  out += " file=" + n.fil_name;
  out += " detail=\"" + escape_detail(n.detail) + "\"";
  out += " at=" + format_iso8601(n.emitted_at);
  return out;
}

std::optional<Notification> parse_notification(std::string_view line) {
  Notification n;
  std::string_view s = line;
  if (!consume(s, "event=")) return std::nullopt;
  auto sp = s.find(' ');
  if (sp == std::string_view::npos) return std::nullopt;
  auto event = parse_event(s.substr(0, sp));
  if (!event) return std::nullopt;
  n.event = *event;
  s.remove_prefix(sp + 1);

  if (!consume(s, "sr=")) return std::nullopt;
  sp = s.find(' ');
  if (sp == std::string_view::npos || sp == 0) return std::nullopt;
  std::int64_t sr = 0;
  for (char c : s.substr(0, sp)) {
    if (c < '0' || c > '9') return std::nullopt;
    sr = sr * 10 + (c - '0');
  }
  n.sr_num = sr;
  s.remove_prefix(sp + 1);

  if (!consume(s, "file=")) return std::nullopt;
  auto marker = s.find(" detail=\"");
  if (marker == std::string_view::npos) return std::nullopt;
  n.fil_name = std::string(s.substr(0, marker));
  s.remove_prefix(marker + 9);

  std::string detail;
  std::size_t i = 0;
  for (;; ++i) {
    if (i >= s.size()) return std::nullopt;
    char c = s[i];
    if (c == '"') break;
    if (c != '\\') {
      detail.push_back(c);
      continue;
    }
    if (++i >= s.size()) return std::nullopt;
    switch (s[i]) {
      case '"': detail.push_back('"'); break;
      case '\\': detail.push_back('\\'); break;
      case 'n': detail.push_back('\n'); break;
      case 'r': detail.push_back('\r'); break;
      case 't': detail.push_back('\t'); break;
      default: return std::nullopt;
    }
  }
  n.detail = std::move(detail);
  s.remove_prefix(i + 1);

  if (!consume(s, " at=")) return std::nullopt;
  auto at = parse_iso8601(s);
  if (!at) return std::nullopt;
  n.emitted_at = *at;
  return n;
}

FileSink::FileSink(std::filesystem::path path) : path_(std::move(path)) {}

std::string FileSink::name() const { return "file:" + path_.string(); }

void FileSink::deliver(const Notification&, const std::string& line) {
  std::lock_guard<std::mutex> lock(path_mutex(path_));
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path_.string());
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path_.string());
}

CommandSink::CommandSink(std::string command_template)
    : template_(std::move(command_template)) {}

std::string CommandSink::name() const { return "command:" + template_; }

std::string CommandSink::expand(const Notification& n) const {
  const std::pair<std::string_view, std::string> vars[] = {
      {"{event}", shell_quote(to_string(n.event))},
      {"{sr}", shell_quote(std::to_string(n.sr_num))},
      {"{file}", shell_quote(n.fil_name)},
  };
  std::string out;
  std::string_view t = template_;
  while (!t.empty()) {
    bool matched = false;
    for (const auto& [key, value] : vars) {
      if (t.substr(0, key.size()) == key) {
        out += value;
        t.remove_prefix(key.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.push_back(t.front());
      t.remove_prefix(1);
    }
  }
  return out;
}

void CommandSink::deliver(const Notification& n, const std::string& line) {
  // The payload goes through a temp file so a command that ignores its
  // input cannot raise SIGPIPE in this process.
  std::string tmpl = (std::filesystem::temp_directory_path() /
                      "flatingest-notify-XXXXXX").string();
  int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw Error(ErrorCode::kIo, "mkstemp failed");
  std::string payload = line + "\n";
  bool written = ::write(fd, payload.data(), payload.size()) ==
                 static_cast<ssize_t>(payload.size());
  ::close(fd);
  if (!written) {
    ::unlink(tmpl.c_str());
    throw Error(ErrorCode::kIo, "cannot stage notification payload");
  }

  std::string command = expand(n);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, tmpl.c_str(), O_RDONLY, 0);
  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = 0;
  int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr,
                       const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    ::unlink(tmpl.c_str());
    throw Error(ErrorCode::kIo, std::string("spawn failed: ") + std::strerror(rc));
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  ::unlink(tmpl.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kIo, "command exited with status " +
                             std::to_string(WIFEXITED(status)
                                                ? WEXITSTATUS(status)
                                                : 128 + WTERMSIG(status)));
  }
}

bool DeliveryReport::all_ok() const {
  for (const auto& r : results) {
    if (!r.ok) return false;
  }
  return true;
}

void Notifier::add_sink(std::unique_ptr<Sink> sink) {
  sinks_.push_back(std::move(sink));
}

DeliveryReport Notifier::notify(const Notification& n) {
  DeliveryReport report;
  const std::string line = serialize(n);
  for (const auto& sink : sinks_) {
    SinkResult result;
    result.sink = sink->name();
    try {
      sink->deliver(n, line);
      result.ok = true;
    } catch (const std::exception& e) {
      result.error = e.what();
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

}  // namespace flatingest::notify
