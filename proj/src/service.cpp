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

#include "judgeprobe/service.hpp"

#include <openssl/rand.h>

#include <fmt/format.h>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/judge.hpp"

namespace judgeprobe {

namespace {

std::string random_token() {
  unsigned char buf[32];
  if (RAND_bytes(buf, sizeof buf) != 1) throw StorageError("RAND_bytes failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : buf) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::int64_t steady_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::int64_t system_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Json to_wire(const SessionView& v) {
  return Json{{"token", v.token},
              {"judge_id", v.judge_id},
              {"run_id", v.run_id},
              {"target", v.target},
              {"done", v.done}};
}

Json to_wire(const NextTask& v) {
  switch (v.status) {
    case NextTask::Status::kTask:
      return Json{{"status", "task"},
                  {"task",
                   {{"task_id", v.task->task_id},
                    {"question", v.task->question},
                    {"answer1", v.task->answer1},
                    {"answer2", v.task->answer2}}}};
    case NextTask::Status::kWait:
      return Json{{"status", "wait"}};
    case NextTask::Status::kDone:
      break;
  }
  return Json{{"status", "done"}};
}

Json to_wire(const VoteAck& v) {
  return Json{{"task_id", v.task_id},
              {"choice", to_string(v.choice)},
              {"duplicate", v.duplicate},
              {"elapsed_ms", v.elapsed_ms}};
}

Json to_wire(const ProgressView& v) {
  return Json{{"judge_id", v.judge_id}, {"run_id", v.run_id}, {"done", v.done},
              {"target", v.target},     {"remaining", v.remaining}, {"total", v.total}};
}

VotingService::VotingService(Store& store, ServiceOptions options)
    : store_(store), options_(std::move(options)) {
  if (!options_.now_ms) options_.now_ms = steady_ms;
  if (!options_.wall_ms) options_.wall_ms = system_ms;
}

VotingService::~VotingService() = default;

std::int64_t VotingService::now() const { return options_.now_ms(); }

VotingService::RunState& VotingService::run_state(const std::string& run_id) {
  auto it = runs_.find(run_id);
  if (it != runs_.end()) return it->second;

  auto data = store_.load_run(run_id);  // NotFoundError for unknown runs
  const JudgeSpec human{options_.human_judge_id, HumanJudge{}, CotMode::kNone};
  if (const auto* existing = data.judge(human.id);
      existing != nullptr && existing->judge_kind() != JudgeKind::kHuman) {
    throw ConflictError("judge id " + human.id + " in run " + run_id + " is not a human judge");
  }
  store_.register_judge(run_id, human);

  RunState state;
  state.tasks = std::move(data.tasks);
  for (std::size_t i = 0; i < state.tasks.size(); ++i) state.task_index.emplace(state.tasks[i].id, i);
  state.samples = std::move(data.samples);
  state.index = std::make_unique<SampleIndex>(state.samples);
  for (auto& v : data.votes) {
    if (v.judge_id == human.id && state.task_index.contains(v.task_id)) {
      state.votes.try_emplace(v.task_id, std::move(v));
    }
  }
  state.writer = std::make_unique<LedgerWriter>(store_.segment(run_id, "votes"));
  return runs_.emplace(run_id, std::move(state)).first->second;
}

VotingService::Session& VotingService::session(const std::string& token) {
  auto it = sessions_.find(token);
  if (token.empty() || it == sessions_.end()) throw AuthError("unknown or missing session token");
  return it->second;
}

bool VotingService::expired(const Assignment& a, std::int64_t t) const {
  auto it = sessions_.find(a.token);
  const auto last = it == sessions_.end() ? a.served_ms : it->second.last_active_ms;
  return t - last > options_.idle_expiry.count();
}

SessionView VotingService::create_session(const std::string& judge_id, const std::string& run_id,
                                          int target) {
  if (judge_id.empty()) throw ValidationError("judge_id must be non-empty");
  if (target < 1) throw ValidationError("target must be >= 1");
  std::lock_guard lock(mu_);
  auto& run = run_state(run_id);

  const auto key = std::pair{judge_id, run_id};
  if (auto it = token_for_.find(key); it != token_for_.end()) {
    auto& s = sessions_.at(it->second);
    s.view.target = target;
    s.last_active_ms = now();
    return s.view;
  }

  if (run.votes.size() >= run.tasks.size()) {
    throw ConflictError("run " + run_id + " has no unserved tasks");
  }
  Session s;
  s.view.token = random_token();
  s.view.judge_id = judge_id;
  s.view.run_id = run_id;
  s.view.target = target;
  for (const auto& [task_id, v] : run.votes) {
    if (v.annotator == judge_id) ++s.view.done;
  }
  s.created_ms = s.last_active_ms = now();
  token_for_.emplace(key, s.view.token);
  return sessions_.emplace(s.view.token, std::move(s)).first->second.view;
}

NextTask VotingService::next_task(const std::string& token) {
  std::lock_guard lock(mu_);
  auto& s = session(token);
  auto& run = run_state(s.view.run_id);
  const auto t = now();
  s.last_active_ms = t;

  if (s.view.done >= s.view.target || run.votes.size() >= run.tasks.size()) {
    return {NextTask::Status::kDone, std::nullopt};
  }

  const ComparisonTask* pick = nullptr;
  // A task already held by this session is served again until voted.
  for (const auto& [task_id, a] : run.assigned) {
    if (a.token == token) {
      pick = &run.tasks[run.task_index.at(task_id)];
      break;
    }
  }
  if (pick == nullptr) {
    for (const auto& task : run.tasks) {
      if (run.votes.contains(task.id)) continue;
      auto it = run.assigned.find(task.id);
      if (it != run.assigned.end() && !expired(it->second, t)) continue;
      // Compare-and-advance: claim under the lock, replacing a stale claim.
      run.assigned[task.id] = Assignment{token, t};
      ++s.served;
      pick = &task;
      break;
    }
  }
  if (pick == nullptr) return {NextTask::Status::kWait, std::nullopt};

  const auto shown = present(*pick, run.index->at(pick->sample_id));
  return {NextTask::Status::kTask,
          TaskPayload{pick->id, std::string(shown.question), std::string(shown.first),
                      std::string(shown.second)}};
}

VoteAck VotingService::submit_vote(const std::string& token, const std::string& task_id,
                                   std::string_view choice_text,
                                   std::optional<std::int64_t> client_elapsed_ms) {
  std::lock_guard lock(mu_);
  auto& s = session(token);
  const Choice choice = parse_choice(choice_text);
  if (client_elapsed_ms && *client_elapsed_ms < 0) {
    throw ValidationError("client_elapsed_ms must be >= 0");
  }
  auto& run = run_state(s.view.run_id);
  if (!run.task_index.contains(task_id)) {
    throw NotFoundError("task " + task_id + " is not part of run " + s.view.run_id);
  }
  const auto t = now();
  s.last_active_ms = t;

  if (auto it = run.votes.find(task_id); it != run.votes.end()) {
    if (it->second.annotator == s.view.judge_id) {
      return VoteAck{task_id, *it->second.choice, true, it->second.elapsed_ms};
    }
    throw ConflictError("task " + task_id + " was already voted by another session");
  }
  auto it = run.assigned.find(task_id);
  if (it == run.assigned.end() || it->second.token != token) {
    throw ConflictError("task " + task_id + " is not assigned to this session");
  }

  Vote v;
  v.task_id = task_id;
  v.judge_id = options_.human_judge_id;
  v.source = JudgeKind::kHuman;
  v.status = VoteStatus::kOk;
  v.choice = choice;
  // Serve-to-submit time on the server clock; never negative even if the
  // injected clock misbehaves.
  v.elapsed_ms = std::max<std::int64_t>(0, t - it->second.served_ms);
  v.client_elapsed_ms = client_elapsed_ms;
  v.cot_mode = CotMode::kNone;
  v.timestamp_ms = std::max(options_.wall_ms(), s.last_vote_stamp);
  s.last_vote_stamp = v.timestamp_ms;
  v.attempts = 1;
  v.annotator = s.view.judge_id;

  run.writer->append(Json(v));
  run.assigned.erase(it);
  ++s.view.done;
  const VoteAck ack{task_id, choice, false, v.elapsed_ms};
  run.votes.emplace(task_id, std::move(v));
  return ack;
}

ProgressView VotingService::progress(const std::string& token) {
  std::lock_guard lock(mu_);
  auto& s = session(token);
  auto& run = run_state(s.view.run_id);
  s.last_active_ms = now();
  return ProgressView{s.view.judge_id, s.view.run_id, s.view.done, s.view.target,
                      run.tasks.size() - run.votes.size(), run.tasks.size()};
}

}  // namespace judgeprobe
