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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "judgeprobe/codec.hpp"
#include "judgeprobe/model.hpp"
#include "judgeprobe/store.hpp"

namespace judgeprobe {

inline constexpr const char* kServiceApiVersion = "1";

struct ServiceOptions {
  std::chrono::milliseconds idle_expiry = std::chrono::minutes(30);
  // Monotonic milliseconds; defaults to std::chrono::steady_clock.
  std::function<std::int64_t()> now_ms;
  // Wall-clock milliseconds stamped on stored votes.
  std::function<std::int64_t()> wall_ms;
  // Judge id under which every human vote of a run is recorded; the session's
  // self-reported id goes to Vote::annotator.
  std::string human_judge_id = "human";
};

struct SessionView {
  std::string token;
  std::string judge_id;
  std::string run_id;
  int target = 0;
  int done = 0;
};

// What a judge sees. Deliberately carries nothing about group, order,
// perturbation or generator.
struct TaskPayload {
  std::string task_id;
  std::string question;
  std::string answer1;
  std::string answer2;
};

struct NextTask {
  enum class Status { kTask, kDone, kWait };
  Status status = Status::kDone;
  std::optional<TaskPayload> task;
};

struct VoteAck {
  std::string task_id;
  Choice choice = Choice::kTie;
  bool duplicate = false;  // already recorded; ledger unchanged
  std::int64_t elapsed_ms = 0;
};

struct ProgressView {
  std::string judge_id;
  std::string run_id;
  int done = 0;
  int target = 0;
  std::size_t remaining = 0;  // unvoted tasks in the run's pool
  std::size_t total = 0;
};

Json to_wire(const SessionView& v);
Json to_wire(const NextTask& v);
Json to_wire(const VoteAck& v);
Json to_wire(const ProgressView& v);

class VotingService {
 public:
  VotingService(Store& store, ServiceOptions options = {});
  ~VotingService();

  // Same (judge id, run id) again → the existing session, progress restored
  // from the vote ledger, target updated.
  SessionView create_session(const std::string& judge_id, const std::string& run_id, int target);
  NextTask next_task(const std::string& token);
  VoteAck submit_vote(const std::string& token, const std::string& task_id,
                      std::string_view choice, std::optional<std::int64_t> client_elapsed_ms);
  ProgressView progress(const std::string& token);

 private:
  struct Assignment {
    std::string token;
    std::int64_t served_ms = 0;
  };
  struct RunState {
    std::vector<ComparisonTask> tasks;
    std::unordered_map<std::string, std::size_t> task_index;
    std::vector<Sample> samples;
    std::unique_ptr<SampleIndex> index;
    std::unordered_map<std::string, Vote> votes;  // human votes by task id
    std::unordered_map<std::string, Assignment> assigned;
    std::unique_ptr<LedgerWriter> writer;
  };
  struct Session {
    SessionView view;
    std::int64_t created_ms = 0;
    std::int64_t last_active_ms = 0;
    std::int64_t last_vote_stamp = 0;
    std::uint64_t served = 0;  // tasks handed out; only grows
  };

  RunState& run_state(const std::string& run_id);
  Session& session(const std::string& token);
  bool expired(const Assignment& a, std::int64_t now) const;
  std::int64_t now() const;

  Store& store_;
  ServiceOptions options_;
  std::mutex mu_;
  std::map<std::string, RunState> runs_;
  std::unordered_map<std::string, Session> sessions_;
  std::map<std::pair<std::string, std::string>, std::string> token_for_;
};

struct HttpOptions {
  std::optional<std::filesystem::path> static_dir;
};

// cpp-httplib frontend for VotingService.
class HttpFrontend {
 public:
  HttpFrontend(VotingService& service, HttpOptions options = {});
  ~HttpFrontend();

  // Binds to an ephemeral port when `port` is 0; returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace judgeprobe
