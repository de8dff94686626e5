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

#include "judgeprobe/codec.hpp"

#include "judgeprobe/errors.hpp"

namespace judgeprobe {
namespace {

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename E>
void put_enum_opt(Json& j, const char* key, const std::optional<E>& v) {
  if (v) j[key] = std::string(to_string(*v));
}

template <typename T>
void get_opt(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  out = it == j.end() ? std::nullopt : std::optional<T>(it->get<T>());
}

std::string str(const Json& j, const char* key) {
  return j.at(key).get<std::string>();
}

}  // namespace

std::string canonical(const Json& j) { return j.dump(); }

void to_json(Json& j, const ReviewDecision& v) {
  j = Json{{"question_id", v.question_id},
           {"verdict", to_string(v.verdict)},
           {"note", v.note}};
  put_enum_opt(j, "level", v.level);
}

void from_json(const Json& j, ReviewDecision& v) {
  v.question_id = str(j, "question_id");
  v.verdict = parse_review_verdict(str(j, "verdict"));
  v.note = j.value("note", "");
  v.level.reset();
  if (j.contains("level")) v.level = parse_bloom_level(str(j, "level"));
}

void to_json(Json& j, const Question& v) {
  j = Json{{"id", v.id},
           {"text", v.text},
           {"level", to_string(v.level)},
           {"status", to_string(v.status)}};
  put_opt(j, "review", v.review);
}

void from_json(const Json& j, Question& v) {
  v.id = str(j, "id");
  v.text = str(j, "text");
  v.level = parse_bloom_level(str(j, "level"));
  v.status = parse_question_status(str(j, "status"));
  get_opt(j, "review", v.review);
}

void to_json(Json& j, const Answer& v) {
  j = Json{{"id", v.id},
           {"question_id", v.question_id},
           {"text", v.text},
           {"generator", v.generator},
           {"variant", to_string(v.variant)},
           {"generation_index", v.generation_index}};
  put_enum_opt(j, "perturbation", v.perturbation);
  put_opt(j, "parent_answer_id", v.parent_answer_id);
  if (!v.stages.empty()) {
    Json stages = Json::array();
    for (auto k : v.stages) stages.push_back(std::string(to_string(k)));
    j["stages"] = std::move(stages);
  }
  if (v.flagged_for_review) j["flagged_for_review"] = true;
}

void from_json(const Json& j, Answer& v) {
  v.id = str(j, "id");
  v.question_id = str(j, "question_id");
  v.text = str(j, "text");
  v.generator = str(j, "generator");
  v.variant = parse_answer_variant(str(j, "variant"));
  v.generation_index = j.at("generation_index").get<int>();
  v.perturbation.reset();
  if (j.contains("perturbation")) {
    v.perturbation = parse_perturbation_kind(str(j, "perturbation"));
  }
  get_opt(j, "parent_answer_id", v.parent_answer_id);
  v.stages.clear();
  if (auto it = j.find("stages"); it != j.end()) {
    for (const auto& s : *it) {
      v.stages.push_back(parse_perturbation_kind(s.get<std::string>()));
    }
  }
  v.flagged_for_review = j.value("flagged_for_review", false);
}

void to_json(Json& j, const Sample& v) {
  j = Json{{"id", v.id},       {"question", v.question},
           {"a1", v.a1},       {"a2", v.a2},
           {"a2p", v.a2p},     {"kind", to_string(v.kind)},
           {"target_flip", v.target_flip}};
  put_enum_opt(j, "pref_ctrl", v.pref_ctrl);
  put_enum_opt(j, "pref_exp", v.pref_exp);
}

void from_json(const Json& j, Sample& v) {
  v.id = str(j, "id");
  v.question = j.at("question").get<Question>();
  v.a1 = j.at("a1").get<Answer>();
  v.a2 = j.at("a2").get<Answer>();
  v.a2p = j.at("a2p").get<Answer>();
  v.kind = parse_perturbation_kind(str(j, "kind"));
  v.target_flip = j.at("target_flip").get<int>();
  v.pref_ctrl.reset();
  v.pref_exp.reset();
  if (j.contains("pref_ctrl")) v.pref_ctrl = parse_preference(str(j, "pref_ctrl"));
  if (j.contains("pref_exp")) v.pref_exp = parse_preference(str(j, "pref_exp"));
}

void to_json(Json& j, const ComparisonTask& v) {
  j = Json{{"id", v.id},
           {"sample_id", v.sample_id},
           {"group", to_string(v.group)},
           {"order", to_string(v.order)},
           {"round", v.round}};
}

void from_json(const Json& j, ComparisonTask& v) {
  v.id = str(j, "id");
  v.sample_id = str(j, "sample_id");
  v.group = parse_group(str(j, "group"));
  v.order = parse_order(str(j, "order"));
  v.round = j.at("round").get<int>();
}

void to_json(Json& j, const Vote& v) {
  j = Json{{"task_id", v.task_id},
           {"judge_id", v.judge_id},
           {"source", to_string(v.source)},
           {"status", to_string(v.status)},
           {"elapsed_ms", v.elapsed_ms},
           {"cot_mode", to_string(v.cot_mode)},
           {"timestamp_ms", v.timestamp_ms},
           {"attempts", v.attempts}};
  put_enum_opt(j, "choice", v.choice);
  put_opt(j, "client_elapsed_ms", v.client_elapsed_ms);
  put_opt(j, "raw_response", v.raw_response);
  put_opt(j, "annotator", v.annotator);
}

void from_json(const Json& j, Vote& v) {
  v.task_id = str(j, "task_id");
  v.judge_id = str(j, "judge_id");
  v.source = parse_judge_kind(str(j, "source"));
  v.status = parse_vote_status(str(j, "status"));
  v.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  v.cot_mode = parse_cot_mode(str(j, "cot_mode"));
  v.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
  v.attempts = j.at("attempts").get<int>();
  v.choice.reset();
  if (j.contains("choice")) v.choice = parse_choice(str(j, "choice"));
  get_opt(j, "client_elapsed_ms", v.client_elapsed_ms);
  get_opt(j, "raw_response", v.raw_response);
  get_opt(j, "annotator", v.annotator);
}

void to_json(Json& j, const EndpointConfig& v) {
  j = Json{{"base_url", v.base_url},
           {"path", v.path},
           {"model", v.model},
           {"temperature", v.temperature},
           {"auth_env", v.auth_env},
           {"timeout_ms", v.timeout_ms},
           {"max_retries", v.max_retries},
           {"fan_out", v.fan_out},
           {"initial_backoff_ms", v.initial_backoff_ms},
           {"max_backoff_ms", v.max_backoff_ms},
           {"backoff_factor", v.backoff_factor},
           {"jitter", v.jitter}};
}

void from_json(const Json& j, EndpointConfig& v) {
  EndpointConfig d;
  v.base_url = j.value("base_url", d.base_url);
  v.path = j.value("path", d.path);
  v.model = j.value("model", d.model);
  v.temperature = j.value("temperature", d.temperature);
  v.auth_env = j.value("auth_env", d.auth_env);
  v.timeout_ms = j.value("timeout_ms", d.timeout_ms);
  v.max_retries = j.value("max_retries", d.max_retries);
  v.fan_out = j.value("fan_out", d.fan_out);
  v.initial_backoff_ms = j.value("initial_backoff_ms", d.initial_backoff_ms);
  v.max_backoff_ms = j.value("max_backoff_ms", d.max_backoff_ms);
  v.backoff_factor = j.value("backoff_factor", d.backoff_factor);
  v.jitter = j.value("jitter", d.jitter);
  if (v.max_retries < 0) throw ValidationError("max_retries must be >= 0");
  if (v.timeout_ms <= 0) throw ValidationError("timeout_ms must be > 0");
  if (v.fan_out < 1) throw ValidationError("fan_out must be >= 1");
}

void to_json(Json& j, const OracleTable& v) {
  j = Json::array();
  for (const auto& [id, e] : v.entries()) {
    Json row{{"sample_id", id}};
    put_enum_opt(row, "any", e.any);
    put_enum_opt(row, "control", e.control);
    put_enum_opt(row, "experimental", e.experimental);
    j.push_back(std::move(row));
  }
}

void from_json(const Json& j, OracleTable& v) {
  v = OracleTable{};
  for (const auto& row : j) {
    const auto id = str(row, "sample_id");
    if (row.contains("any")) v.set(id, parse_preference(str(row, "any")));
    if (row.contains("control")) {
      v.set(id, Group::kControl, parse_preference(str(row, "control")));
    }
    if (row.contains("experimental")) {
      v.set(id, Group::kExperimental,
            parse_preference(str(row, "experimental")));
    }
  }
}

void to_json(Json& j, const ScriptedPolicy& v) {
  using T = ScriptedPolicy::Type;
  switch (v.type()) {
    case T::kUniformRandom:
      j = Json{{"type", "uniform_random"}};
      break;
    case T::kConstant:
      j = Json{{"type", "constant"}, {"choice", to_string(v.constant_choice())}};
      break;
    case T::kOracle:
      j = Json{{"type", "oracle"}, {"table", v.oracle_table()}};
      break;
    case T::kFlip:
      j = Json{{"type", "flip"}, {"p", v.flip_probability()}, {"base", v.base()}};
      break;
    case T::kLongerWins:
      j = Json{{"type", "longer_wins"}};
      break;
  }
}

void from_json(const Json& j, ScriptedPolicy& v) {
  const auto type = str(j, "type");
  if (type == "uniform_random") {
    v = ScriptedPolicy::uniform_random();
  } else if (type == "constant") {
    v = ScriptedPolicy::constant(parse_choice(str(j, "choice")));
  } else if (type == "oracle") {
    v = ScriptedPolicy::oracle(j.at("table").get<OracleTable>());
  } else if (type == "flip") {
    v = ScriptedPolicy::flip(j.at("base").get<ScriptedPolicy>(),
                             j.at("p").get<double>());
  } else if (type == "longer_wins") {
    v = ScriptedPolicy::longer_wins();
  } else {
    throw ValidationError("unknown scripted policy '" + type + "'");
  }
}

void to_json(Json& j, const JudgeSpec& v) {
  j = Json{{"id", v.id},
           {"kind", to_string(v.judge_kind())},
           {"cot_mode", to_string(v.cot_mode)}};
  if (const auto* s = std::get_if<ScriptedJudge>(&v.kind)) {
    j["policy"] = s->policy;
    j["seed"] = s->seed;
  } else if (const auto* r = std::get_if<RemoteJudge>(&v.kind)) {
    j["endpoint"] = r->endpoint;
  }
}

void from_json(const Json& j, JudgeSpec& v) {
  v.id = str(j, "id");
  v.cot_mode = parse_cot_mode(j.value("cot_mode", "none"));
  switch (parse_judge_kind(str(j, "kind"))) {
    case JudgeKind::kScripted:
      v.kind = ScriptedJudge{j.at("policy").get<ScriptedPolicy>(),
                             j.value("seed", std::uint64_t{0})};
      break;
    case JudgeKind::kRemote:
      v.kind = RemoteJudge{j.at("endpoint").get<EndpointConfig>()};
      break;
    case JudgeKind::kHuman:
      v.kind = HumanJudge{};
      break;
  }
  if (v.id.empty()) throw ValidationError("judge id must not be empty");
}

}  // namespace judgeprobe
