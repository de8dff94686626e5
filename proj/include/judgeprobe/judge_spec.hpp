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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "judgeprobe/model.hpp"

namespace judgeprobe {

// Chat-completion style endpoint. The auth token is read from the environment
// variable named by `auth_env` at call time and is never persisted.
struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8080";
  std::string path = "/v1/chat/completions";
  std::string model;
  double temperature = 0.0;
  std::string auth_env;
  std::int64_t timeout_ms = 60000;
  int max_retries = 3;
  int fan_out = 4;
  std::int64_t initial_backoff_ms = 1000;
  std::int64_t max_backoff_ms = 30000;
  double backoff_factor = 2.0;
  bool jitter = true;

  bool operator==(const EndpointConfig&) const = default;
};

// Stored preferences for an Oracle judge. A group-specific entry wins over the
// group-agnostic one.
class OracleTable {
 public:
  void set(const std::string& sample_id, Preference pref);
  void set(const std::string& sample_id, Group group, Preference pref);
  std::optional<Preference> lookup(const std::string& sample_id,
                                   Group group) const;

  struct Entry {
    std::optional<Preference> any;
    std::optional<Preference> control;
    std::optional<Preference> experimental;
    bool operator==(const Entry&) const = default;
  };
  const std::map<std::string, Entry>& entries() const { return entries_; }
  bool operator==(const OracleTable&) const = default;

 private:
  std::map<std::string, Entry> entries_;
};

class ScriptedPolicy {
 public:
  enum class Type { kUniformRandom, kConstant, kOracle, kFlip, kLongerWins };

  static ScriptedPolicy uniform_random();
  static ScriptedPolicy constant(Choice c);
  static ScriptedPolicy oracle(OracleTable table);
  static ScriptedPolicy flip(ScriptedPolicy base, double p);
  static ScriptedPolicy longer_wins();

  Type type() const { return type_; }
  Choice constant_choice() const { return constant_; }
  const OracleTable& oracle_table() const { return *oracle_; }
  const ScriptedPolicy& base() const { return *base_; }
  double flip_probability() const { return flip_p_; }

  // Short human-readable form, e.g. "flip(oracle,0.1)".
  std::string describe() const;

  bool operator==(const ScriptedPolicy& other) const;

 private:
  Type type_ = Type::kUniformRandom;
  Choice constant_ = Choice::kTie;
  std::shared_ptr<const OracleTable> oracle_;
  std::shared_ptr<const ScriptedPolicy> base_;
  double flip_p_ = 0.0;
};

struct ScriptedJudge {
  ScriptedPolicy policy;
  std::uint64_t seed = 0;
  bool operator==(const ScriptedJudge&) const = default;
};

struct RemoteJudge {
  EndpointConfig endpoint;
  bool operator==(const RemoteJudge&) const = default;
};

struct HumanJudge {
  bool operator==(const HumanJudge&) const = default;
};

struct JudgeSpec {
  std::string id;
  std::variant<ScriptedJudge, RemoteJudge, HumanJudge> kind;
  CotMode cot_mode = CotMode::kNone;

  JudgeKind judge_kind() const;
  bool operator==(const JudgeSpec&) const = default;
};

}  // namespace judgeprobe
