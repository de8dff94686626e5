// Copyright 2026 The judgeprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "judgeprobe/table.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace judgeprobe {
namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_csv_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  append_csv_row(out, header);
  for (const auto& r : rows) append_csv_row(out, r);
  return out;
}

std::string Table::to_text() const {
  std::vector<std::size_t> width(header.size(), 0);
  auto measure = [&](const std::vector<std::string>& row) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  };
  measure(header);
  for (const auto& r : rows) measure(r);

  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      // First column left-aligned, numeric columns right-aligned.
      line += i == 0 ? fmt::format("{:<{}}", row[i], width[i])
                     : fmt::format("{:>{}}", row[i], width[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += width.empty() ? 0 : 2 * (width.size() - 1);
  out += std::string(total, '-');
  out += '\n';
  for (const auto& r : rows) emit(r);
  for (const auto& f : footer) {
    out += f;
    out += '\n';
  }
  return out;
}

std::string format_fixed(double v, int precision) {
  return fmt::format("{:.{}f}", v, precision);
}

}  // namespace judgeprobe
