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

#pragma once

#include <string>
#include <vector>

namespace judgeprobe {

// A rectangular table of pre-formatted cells, rendered either as
// comma-separated values or as column-aligned text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;  // free-text notes, text rendering only

  std::string to_csv() const;
  std::string to_text() const;
};

// Fixed-precision decimal, e.g. format_fixed(0.0625, 2) == "0.06".
std::string format_fixed(double v, int precision);

}  // namespace judgeprobe
