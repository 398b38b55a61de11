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

// Synthetic files shaped like the circuit-order extract (12 columns with a
// header) and the headerless 48-column CDR extract.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatingest::testing {

inline const std::vector<std::string>& circuit_header() {
  static const std::vector<std::string> kHeader = {
      "Order ID",    "Order Number",      "vendor",       "Circuit ID",
      "FOC Received Date", "FOC Date",    "Install Cost", "PON",
      "Service Type", "Disconnect Date",  "Status",       "Notes"};
  return kHeader;
}

/// Distributes `target - size` filler characters across the rows' last
/// field so the joined file is exactly `target` bytes.
inline std::string pad_to_size(std::vector<std::string> lines,
                               std::size_t target) {
  std::size_t size = 0;
  for (const auto& l : lines) size += l.size() + 2;  // CR LF
  if (size > target) throw std::logic_error("fixture larger than target size");
  std::size_t deficit = target - size;
  std::size_t data_rows = lines.size() - 1;
  for (std::size_t i = 0; deficit > 0; i = (i + 1) % data_rows, --deficit) {
    lines[1 + i].push_back('z');
  }
  std::string out;
  out.reserve(target);
  for (const auto& l : lines) {
    out += l;
    out += "\r\n";
  }
  return out;
}

/// Header plus `rows` 12-field records; `target_size` pads the notes column.
inline std::string circuit_file(std::size_t rows, std::size_t target_size = 0) {
  static const char* kVendors[] = {"BellSouth", "Alltel", "Sprint", "AT&T",
                                   "Qwest", "Verizon", "SBC", "DUKE NET"};
  std::vector<std::string> lines;
  std::string header;
  for (std::size_t c = 0; c < circuit_header().size(); ++c) {
    if (c > 0) header += ",";
    header += "\"" + circuit_header()[c] + "\"";
  }
  lines.push_back(header);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string line = std::to_string(5895 + i) + ",\"" + kVendors[i % 8] +
                       "\",KY/HCGS/" + std::to_string(106276 + i) +
                       ",7/24/08,8/15/08," + (i % 5 == 0 ? "" : "8/18/08") + ",$" +
                       std::to_string(500 + i % 700) + ".00," +
                       std::to_string(26972 + i) + ",\"DS1,\"\"T1\"\"\"," +
                       (i % 3 == 0 ? "" : "9/2/08") + ",0,\"n";
    line += "\"";
    lines.push_back(std::move(line));
  }
  if (target_size == 0) {
    std::string out;
    for (const auto& l : lines) out += l + "\r\n";
    return out;
  }
  // Padding goes inside the quoted notes field: strip the closing quote,
  // pad, and close it again.
  for (std::size_t i = 1; i < lines.size(); ++i) lines[i].pop_back();
  std::size_t closing = lines.size() - 1;
  std::string out = pad_to_size(std::move(lines), target_size - closing);
  std::string fixed;
  fixed.reserve(target_size);
  std::size_t pos = 0;
  bool header_done = false;
  while (pos < out.size()) {
    auto eol = out.find("\r\n", pos);
    fixed.append(out, pos, eol - pos);
    if (header_done) fixed.push_back('"');
    header_done = true;
    fixed += "\r\n";
    pos = eol + 2;
  }
  return fixed;
}

/// `rows` headerless records of `cols` fields; first field is numeric.
inline std::string cdr_file(std::size_t rows, std::size_t cols,
                            std::size_t target_size = 0) {
  std::vector<std::string> lines;
  lines.push_back("");  // placeholder so pad_to_size skips index 0
  for (std::size_t i = 0; i < rows; ++i) {
    std::string line = std::to_string(20140614000000ULL + i);
    for (std::size_t c = 1; c < cols; ++c) {
      line += ",";
      switch (c % 6) {
        case 0: line += std::to_string((i * 31 + c) % 997); break;
        case 1: line += "\"USR" + std::to_string(i % 41) + "\""; break;
        case 2: break;  // absent
        case 3: line += "\"a,b\""; break;
        case 4: line += "0614"; break;
        default: line += "x" + std::to_string(c); break;
      }
    }
    lines.push_back(std::move(line));
  }
  std::string out;
  if (target_size == 0) {
    for (std::size_t i = 1; i < lines.size(); ++i) out += lines[i] + "\r\n";
    return out;
  }
  // The last field is unquoted text; pad it, then drop the placeholder.
  out = pad_to_size(std::move(lines), target_size + 2);
  return out.substr(2);
}

}  // namespace flatingest::testing
