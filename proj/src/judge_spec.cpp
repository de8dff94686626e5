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

#include "judgeprobe/judge_spec.hpp"

#include <fmt/format.h>

#include "judgeprobe/errors.hpp"

namespace judgeprobe {

void OracleTable::set(const std::string& sample_id, Preference pref) {
  entries_[sample_id].any = pref;
}

void OracleTable::set(const std::string& sample_id, Group group,
                      Preference pref) {
  auto& e = entries_[sample_id];
  (group == Group::kControl ? e.control : e.experimental) = pref;
}

std::optional<Preference> OracleTable::lookup(const std::string& sample_id,
                                              Group group) const {
  auto it = entries_.find(sample_id);
  if (it == entries_.end()) return std::nullopt;
  const auto& specific =
      group == Group::kControl ? it->second.control : it->second.experimental;
  return specific ? specific : it->second.any;
}

ScriptedPolicy ScriptedPolicy::uniform_random() { return {}; }

ScriptedPolicy ScriptedPolicy::constant(Choice c) {
  ScriptedPolicy p;
  p.type_ = Type::kConstant;
  p.constant_ = c;
  return p;
}

ScriptedPolicy ScriptedPolicy::oracle(OracleTable table) {
  ScriptedPolicy p;
  p.type_ = Type::kOracle;
  p.oracle_ = std::make_shared<const OracleTable>(std::move(table));
  return p;
}

ScriptedPolicy ScriptedPolicy::flip(ScriptedPolicy base, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw ValidationError(fmt::format("flip probability {} outside [0,1]", prob));
  }
  ScriptedPolicy p;
  p.type_ = Type::kFlip;
  p.base_ = std::make_shared<const ScriptedPolicy>(std::move(base));
  p.flip_p_ = prob;
  return p;
}

ScriptedPolicy ScriptedPolicy::longer_wins() {
  ScriptedPolicy p;
  p.type_ = Type::kLongerWins;
  return p;
}

std::string ScriptedPolicy::describe() const {
  switch (type_) {
    case Type::kUniformRandom:
      return "random";
    case Type::kConstant:
      return fmt::format("constant({})", to_string(constant_));
    case Type::kOracle:
      return fmt::format("oracle[{}]", oracle_->entries().size());
    case Type::kFlip:
      return fmt::format("flip({},{})", base_->describe(), flip_p_);
    case Type::kLongerWins:
      return "longer";
  }
  return "?";
}

bool ScriptedPolicy::operator==(const ScriptedPolicy& o) const {
  if (type_ != o.type_) return false;
  switch (type_) {
    case Type::kUniformRandom:
    case Type::kLongerWins:
      return true;
    case Type::kConstant:
      return constant_ == o.constant_;
    case Type::kOracle:
      return *oracle_ == *o.oracle_;
    case Type::kFlip:
      return flip_p_ == o.flip_p_ && *base_ == *o.base_;
  }
  return false;
}

JudgeKind JudgeSpec::judge_kind() const {
  if (std::holds_alternative<ScriptedJudge>(kind)) return JudgeKind::kScripted;
  if (std::holds_alternative<RemoteJudge>(kind)) return JudgeKind::kRemote;
  return JudgeKind::kHuman;
}

}  // namespace judgeprobe
