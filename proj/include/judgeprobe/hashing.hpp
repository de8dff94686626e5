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

#include <cstdint>
#include <string>
#include <string_view>

namespace judgeprobe {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// First 16 hex chars of SHA-256 over the parts joined by a unit separator.
std::string content_id(std::initializer_list<std::string_view> parts);

}  // namespace judgeprobe
