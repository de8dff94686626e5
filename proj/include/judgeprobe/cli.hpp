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

#include <ostream>
#include <string>
#include <vector>

#include "judgeprobe/chat_client.hpp"

namespace judgeprobe {

struct CliEnvironment {
  TransportFactory transport_factory = http_transport_factory();
};

// Runs one `judgeprobe` invocation. `args` excludes the program name. Returns
// the process exit status; failures print a JSON error record on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const CliEnvironment& env = {});

}  // namespace judgeprobe
