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
#include <random>
#include <string_view>

namespace judgeprobe {

// Random stream derived from (seed, key, salt). Each task id gets its own
// stream, so sampled values do not depend on execution order or concurrency.
// Values are fully specified: the engine is mt19937_64 and the mappings below
// do not rely on implementation-defined distributions.
class DerivedStream {
 public:
  DerivedStream(std::uint64_t seed, std::string_view key,
                std::string_view salt = {});

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform double in [0, 1) with 53 bits of precision.
  double unit();
  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_key(std::uint64_t seed, std::string_view key,
                         std::string_view salt);

}  // namespace judgeprobe
