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

// Schedules balanced, position-shuffled comparisons and executes judges over
// them. Scripted judges are pure functions of (policy, seed, task id); remote
// judges run with bounded concurrency and retries.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "judgeprobe/chat_client.hpp"
#include "judgeprobe/judge_spec.hpp"
#include "judgeprobe/model.hpp"
#include "judgeprobe/prompts.hpp"

namespace judgeprobe {

inline constexpr std::array<Group, 2> kBothGroups = {Group::kControl,
                                                     Group::kExperimental};

// 2k tasks per (sample, group): k rounds in each order. The returned sequence
// is a seeded permutation of all tasks.
std::vector<ComparisonTask> build_schedule(std::span<const Sample> samples,
                                           int votes_per_order,
                                           std::uint64_t seed,
                                           std::span<const Group> groups = kBothGroups);

// The texts shown for a task, already in presentation order.
struct Presentation {
  std::string_view question;
  std::string_view first;
  std::string_view second;
};

Presentation present(const ComparisonTask& task, const Sample& sample);

EvalPrompt render_eval_prompt(const ComparisonTask& task, const Sample& sample,
                              CotMode cot_mode);

// Reads the verdict line of a model response. Throws VerdictParseError when the
// line carries no verdict token or more than one distinct token.
Choice parse_verdict(std::string_view raw_response, CotMode cot_mode);

// The choice that expresses `pref` when answers are shown in `order`.
Choice choice_for_preference(Preference pref, Order order);

Choice scripted_choice(const ScriptedPolicy& policy, std::uint64_t seed,
                       const ComparisonTask& task, const Presentation& shown);

Vote run_scripted(const JudgeSpec& judge, const ComparisonTask& task,
                  const Presentation& shown);

struct JudgeRunOptions {
  TransportFactory transport_factory = http_transport_factory();
  Sleeper sleep;
  std::function<std::int64_t()> now_ms;
  // Overrides the endpoint's fan-out when positive.
  int fan_out = 0;
};

struct JudgeRunResult {
  std::vector<Vote> votes;  // same order as the input tasks
  std::vector<std::pair<std::string, AttemptRecord>> attempts;
};

// One vote per task. Transport failures after the retry budget produce a
// failed vote; unparseable responses produce an invalid vote. The run always
// continues.
JudgeRunResult run_remote(const JudgeSpec& judge,
                          std::span<const ComparisonTask> tasks,
                          const SampleIndex& samples,
                          const JudgeRunOptions& options = {});

// Dispatches on the judge kind. Human judges vote through the service and are
// rejected here.
JudgeRunResult run_judge(const JudgeSpec& judge,
                         std::span<const ComparisonTask> tasks,
                         const SampleIndex& samples,
                         const JudgeRunOptions& options = {});

}  // namespace judgeprobe
