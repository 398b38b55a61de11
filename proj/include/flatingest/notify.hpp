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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flatingest/timestamp.hpp"

namespace flatingest::notify {

enum class Event { kSuccess, kDuplicate, kFailure };

std::string_view to_string(Event event);
std::optional<Event> parse_event(std::string_view text);

struct Notification {
  Event event = Event::kSuccess;
  std::int64_t sr_num = 0;
  std::string fil_name;
  std::string detail;
  Timestamp emitted_at{};

  bool operator==(const Notification&) const = default;
};

/// `event=<E> sr=<N> file=<name> detail="<escaped>" at=<ISO-8601>`, no
/// trailing newline. Inside detail, `"` and `\` are backslash-escaped and
/// CR/LF/TAB are written as \r \n \t.
std::string serialize(const Notification& n);
std::optional<Notification> parse_notification(std::string_view line);

/// A delivery channel. deliver() throws on failure.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual std::string name() const = 0;
  virtual void deliver(const Notification& n, const std::string& line) = 0;
};

/// Appends one line per notification. Appends to the same path are
/// serialized across all FileSink instances in the process.
class FileSink : public Sink {
 public:
  explicit FileSink(std::filesystem::path path);
  std::string name() const override;
  void deliver(const Notification& n, const std::string& line) override;

 private:
  std::filesystem::path path_;
};

/// Runs `/bin/sh -c <template>` with the serialized line (plus newline) on
/// standard input. `{event}`, `{sr}` and `{file}` in the template are
/// replaced by shell-quoted values. A nonzero exit status is a failure.
class CommandSink : public Sink {
 public:
  explicit CommandSink(std::string command_template);
  std::string name() const override;
  void deliver(const Notification& n, const std::string& line) override;

  std::string expand(const Notification& n) const;

 private:
  std::string template_;
};

struct SinkResult {
  std::string sink;
  bool ok = false;
  std::string error;
};

struct DeliveryReport {
  std::vector<SinkResult> results;

  bool all_ok() const;
};

class Notifier {
 public:
  void add_sink(std::unique_ptr<Sink> sink);
  std::size_t sink_count() const noexcept { return sinks_.size(); }

  /// Never throws for sink failures; they are reported per sink.
  DeliveryReport notify(const Notification& n);

 private:
  std::vector<std::unique_ptr<Sink>> sinks_;
};

}  // namespace flatingest::notify
