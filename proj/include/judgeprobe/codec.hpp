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

// Canonical JSON encoding for every domain value. Objects are emitted with
// sorted keys and no insignificant whitespace; absent optionals are omitted,
// so decode followed by encode is byte-identical.

#include <nlohmann/json.hpp>

#include <string>

#include "judgeprobe/judge_spec.hpp"
#include "judgeprobe/model.hpp"

namespace judgeprobe {

using Json = nlohmann::json;

std::string canonical(const Json& j);

void to_json(Json& j, const ReviewDecision& v);
void from_json(const Json& j, ReviewDecision& v);
void to_json(Json& j, const Question& v);
void from_json(const Json& j, Question& v);
void to_json(Json& j, const Answer& v);
void from_json(const Json& j, Answer& v);
void to_json(Json& j, const Sample& v);
void from_json(const Json& j, Sample& v);
void to_json(Json& j, const ComparisonTask& v);
void from_json(const Json& j, ComparisonTask& v);
void to_json(Json& j, const Vote& v);
void from_json(const Json& j, Vote& v);
void to_json(Json& j, const EndpointConfig& v);
void from_json(const Json& j, EndpointConfig& v);
void to_json(Json& j, const OracleTable& v);
void from_json(const Json& j, OracleTable& v);
void to_json(Json& j, const ScriptedPolicy& v);
void from_json(const Json& j, ScriptedPolicy& v);
void to_json(Json& j, const JudgeSpec& v);
void from_json(const Json& j, JudgeSpec& v);

}  // namespace judgeprobe
