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

#include <cstddef>
#include <string>
#include <string_view>

namespace judgeprobe {

// Number of word tokens: maximal runs of ASCII letters/digits, apostrophes
// inside a run, or any non-ASCII code unit.
std::size_t word_count(std::string_view text);

// Removes emphasis and heading markers and collapses whitespace. Used by the
// semantic-preservation check.
std::string normalize_for_comparison(std::string_view text);

// True if `needle`'s word tokens appear in order (not necessarily adjacent)
// among `haystack`'s word tokens, after normalization.
bool contains_as_word_subsequence(std::string_view haystack,
                                  std::string_view needle);

std::string trim(std::string_view s);

}  // namespace judgeprobe
