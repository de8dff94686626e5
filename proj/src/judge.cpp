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

#include "judgeprobe/judge.hpp"

#include <fmt/format.h>

#include <cctype>
#include <chrono>
#include <mutex>
#include <regex>
#include <set>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/parallel.hpp"
#include "judgeprobe/rng.hpp"
#include "judgeprobe/text.hpp"

namespace judgeprobe {

std::vector<ComparisonTask> build_schedule(std::span<const Sample> samples,
                                           int votes_per_order,
                                           std::uint64_t seed,
                                           std::span<const Group> groups) {
  if (votes_per_order < 1) {
    throw ValidationError(
        fmt::format("votes per order must be >= 1, got {}", votes_per_order));
  }
  std::vector<ComparisonTask> tasks;
  tasks.reserve(samples.size() * groups.size() * 2 * votes_per_order);
  for (const auto& s : samples) {
    for (Group g : groups) {
      for (Order o : {Order::kA1First, Order::kA2First}) {
        for (int r = 1; r <= votes_per_order; ++r) {
          tasks.push_back({task_id_for(s.id, g, o, r), s.id, g, o, r});
        }
      }
    }
  }
  // Fisher-Yates with a fully specified stream so the order is portable.
  DerivedStream rng(seed, "schedule");
  for (std::size_t i = tasks.size(); i > 1; --i) {
    std::swap(tasks[i - 1], tasks[rng.below(i)]);
  }
  return tasks;
}

Presentation present(const ComparisonTask& task, const Sample& sample) {
  const std::string& other =
      task.group == Group::kControl ? sample.a2.text : sample.a2p.text;
  if (task.order == Order::kA1First) {
    return {sample.question.text, sample.a1.text, other};
  }
  return {sample.question.text, other, sample.a1.text};
}

EvalPrompt render_eval_prompt(const ComparisonTask& task, const Sample& sample,
                              CotMode cot_mode) {
  const auto shown = present(task, sample);
  return render_eval_prompt(shown.question, shown.first, shown.second, cot_mode);
}

namespace {

std::vector<std::string_view> non_empty_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (trim(line).size() > 0) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

Choice parse_verdict(std::string_view raw_response, CotMode cot_mode) {
  const auto lines = non_empty_lines(raw_response);
  if (lines.empty()) throw VerdictParseError("empty response");
  const auto line =
      cot_mode == CotMode::kAnswerFirst ? lines.front() : lines.back();

  std::string lowered;
  lowered.reserve(line.size());
  for (char c : line) {
    lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  static const std::regex kSpacedAnswer(R"(answer\s+([12])\b)");
  lowered = std::regex_replace(lowered, kSpacedAnswer, "answer$1");

  std::set<Choice> found;
  std::string token;
  auto flush = [&] {
    if (token == "answer1") found.insert(Choice::kFirst);
    if (token == "answer2") found.insert(Choice::kSecond);
    if (token == "tie") found.insert(Choice::kTie);
    token.clear();
  };
  for (char c : lowered) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(c);
    } else {
      flush();
    }
  }
  flush();

  if (found.empty()) {
    throw VerdictParseError("no verdict token in line: " + std::string(line));
  }
  if (found.size() > 1) {
    throw VerdictParseError("ambiguous verdict line: " + std::string(line));
  }
  return *found.begin();
}

Choice choice_for_preference(Preference pref, Order order) {
  switch (pref) {
    case Preference::kTie:
      return Choice::kTie;
    case Preference::kA1:
      return order == Order::kA1First ? Choice::kFirst : Choice::kSecond;
    case Preference::kA2:
      return order == Order::kA1First ? Choice::kSecond : Choice::kFirst;
  }
  return Choice::kTie;
}

namespace {

Choice scripted_choice_at(const ScriptedPolicy& policy, std::uint64_t seed,
                          const ComparisonTask& task, const Presentation& shown,
                          int depth) {
  using T = ScriptedPolicy::Type;
  switch (policy.type()) {
    case T::kUniformRandom: {
      DerivedStream rng(seed, task.id, fmt::format("uniform#{}", depth));
      static constexpr Choice kChoices[] = {Choice::kFirst, Choice::kSecond,
                                            Choice::kTie};
      return kChoices[rng.below(3)];
    }
    case T::kConstant:
      return policy.constant_choice();
    case T::kOracle: {
      auto pref = policy.oracle_table().lookup(task.sample_id, task.group);
      if (!pref) {
        throw NotFoundError("oracle has no preference for sample " +
                            task.sample_id);
      }
      return choice_for_preference(*pref, task.order);
    }
    case T::kFlip: {
      Choice c = scripted_choice_at(policy.base(), seed, task, shown, depth + 1);
      DerivedStream rng(seed, task.id, fmt::format("flip#{}", depth));
      if (rng.bernoulli(policy.flip_probability())) {
        if (c == Choice::kFirst) return Choice::kSecond;
        if (c == Choice::kSecond) return Choice::kFirst;
      }
      return c;
    }
    case T::kLongerWins: {
      const auto a = word_count(shown.first);
      const auto b = word_count(shown.second);
      if (a == b) return Choice::kTie;
      return a > b ? Choice::kFirst : Choice::kSecond;
    }
  }
  return Choice::kTie;
}

}  // namespace

Choice scripted_choice(const ScriptedPolicy& policy, std::uint64_t seed,
                       const ComparisonTask& task, const Presentation& shown) {
  return scripted_choice_at(policy, seed, task, shown, 0);
}

Vote run_scripted(const JudgeSpec& judge, const ComparisonTask& task,
                  const Presentation& shown) {
  const auto* scripted = std::get_if<ScriptedJudge>(&judge.kind);
  if (scripted == nullptr) {
    throw UsageError("judge " + judge.id + " is not scripted");
  }
  Vote v;
  v.task_id = task.id;
  v.judge_id = judge.id;
  v.source = JudgeKind::kScripted;
  v.choice = scripted_choice(scripted->policy, scripted->seed, task, shown);
  v.cot_mode = judge.cot_mode;
  return v;
}

namespace {

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

JudgeRunResult run_remote(const JudgeSpec& judge,
                          std::span<const ComparisonTask> tasks,
                          const SampleIndex& samples,
                          const JudgeRunOptions& options) {
  const auto* remote = std::get_if<RemoteJudge>(&judge.kind);
  if (remote == nullptr) {
    throw UsageError("judge " + judge.id + " is not remote");
  }
  const auto& endpoint = remote->endpoint;
  auto transport = options.transport_factory(endpoint);
  const auto policy = RetryPolicy::from(endpoint);
  const auto now = options.now_ms ? options.now_ms : wall_clock_ms;

  JudgeRunResult result;
  result.votes.resize(tasks.size());
  std::vector<std::vector<AttemptRecord>> logs(tasks.size());

  const int fan_out = options.fan_out > 0 ? options.fan_out : endpoint.fan_out;
  for_each_bounded(tasks.size(), fan_out, [&](std::size_t i) {
    const auto& task = tasks[i];
    const auto prompt =
        render_eval_prompt(task, samples.at(task.sample_id), judge.cot_mode);
    ChatRequest request{prompt.system, prompt.user, endpoint.temperature, task.id};
    auto outcome = call_with_retry(*transport, request, policy,
                                   derive_key(0, task.id, judge.id), options.sleep);

    Vote v;
    v.task_id = task.id;
    v.judge_id = judge.id;
    v.source = JudgeKind::kRemote;
    v.cot_mode = judge.cot_mode;
    v.attempts = outcome.attempts;
    v.elapsed_ms = outcome.total_latency_ms;
    v.timestamp_ms = now();
    if (!outcome.content) {
      v.status = VoteStatus::kFailed;
      v.raw_response = "";
    } else {
      v.raw_response = *outcome.content;
      try {
        v.choice = parse_verdict(*outcome.content, judge.cot_mode);
      } catch (const VerdictParseError&) {
        v.status = VoteStatus::kInvalid;
      }
    }
    result.votes[i] = std::move(v);
    logs[i] = std::move(outcome.log);
  });

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (auto& rec : logs[i]) result.attempts.emplace_back(tasks[i].id, rec);
  }
  return result;
}

JudgeRunResult run_judge(const JudgeSpec& judge,
                         std::span<const ComparisonTask> tasks,
                         const SampleIndex& samples,
                         const JudgeRunOptions& options) {
  switch (judge.judge_kind()) {
    case JudgeKind::kScripted: {
      JudgeRunResult result;
      result.votes.reserve(tasks.size());
      for (const auto& t : tasks) {
        result.votes.push_back(
            run_scripted(judge, t, present(t, samples.at(t.sample_id))));
      }
      return result;
    }
    case JudgeKind::kRemote:
      return run_remote(judge, tasks, samples, options);
    case JudgeKind::kHuman:
      break;
  }
  throw UsageError("human judge " + judge.id +
                   " votes through the service, not `judge run`");
}

}  // namespace judgeprobe
