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

#include "judgeprobe/text.hpp"

#include <cctype>
#include <vector>

namespace judgeprobe {
namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool inner_apostrophe = c == '\'' && !cur.empty() &&
                                  i + 1 < text.size() &&
                                  is_word_byte(static_cast<unsigned char>(text[i + 1]));
    if (is_word_byte(c) || inner_apostrophe) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::size_t word_count(std::string_view text) {
  return word_tokens(text).size();
}

std::string normalize_for_comparison(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    if (ch == '*' || ch == '_' || ch == '#' || ch == '`' || ch == '>') {
      pending_space = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

bool contains_as_word_subsequence(std::string_view haystack,
                                  std::string_view needle) {
  const auto hay = word_tokens(normalize_for_comparison(haystack));
  const auto need = word_tokens(normalize_for_comparison(needle));
  std::size_t j = 0;
  for (std::size_t i = 0; i < hay.size() && j < need.size(); ++i) {
    if (hay[i] == need[j]) ++j;
  }
  return j == need.size();
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace judgeprobe
