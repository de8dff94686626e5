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

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <set>
#include <thread>

#include "judgeprobe/aggregation.hpp"
#include "judgeprobe/errors.hpp"
#include "judgeprobe/judge.hpp"
#include "judgeprobe/service.hpp"
#include "judgeprobe/store.hpp"
#include "testing.hpp"

namespace judgeprobe {
namespace {

namespace fs = std::filesystem;

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() : dir_("service"), store_(dir_.path()) {
    samples_ = testing::synthetic_samples(2, PerturbationKind::kRichContent);
    RunManifest m;
    m.run_id = "human-run";
    m.dataset_hash = store_.put_dataset(samples_);
    m.created_at = "2026-01-01T00:00:00Z";
    const std::vector<Group> ctrl{Group::kControl};
    tasks_ = build_schedule(samples_, 1, 2, ctrl);  // 4 tasks
    store_.create_run(m, tasks_);
  }

  ServiceOptions options() {
    ServiceOptions o;
    o.now_ms = [this] { return clock_; };
    o.wall_ms = [this] { return 1'700'000'000'000 + clock_; };
    return o;
  }

  std::vector<Vote> stored_votes() { return store_.load_run("human-run").votes; }

  testing::TempDir dir_;
  Store store_;
  std::vector<Sample> samples_;
  std::vector<ComparisonTask> tasks_;
  std::int64_t clock_ = 1000;
};

TEST_F(ServiceTest, FreshSessionServesScheduledTasksInOrder) {
  VotingService svc(store_, options());
  const auto s = svc.create_session("s001", "human-run", 4);
  EXPECT_EQ(s.done, 0);
  EXPECT_EQ(s.token.size(), 64u);
  const auto next = svc.next_task(s.token);
  ASSERT_EQ(next.status, NextTask::Status::kTask);
  EXPECT_EQ(next.task->task_id, tasks_[0].id);
  // Re-asking before voting re-serves the same assignment.
  EXPECT_EQ(svc.next_task(s.token).task->task_id, tasks_[0].id);
}

TEST_F(ServiceTest, VotesAreStoredWithServerElapsedTime) {
  VotingService svc(store_, options());
  const auto s = svc.create_session("s001", "human-run", 4);
  const auto t = svc.next_task(s.token).task->task_id;
  clock_ += 6200;
  const auto ack = svc.submit_vote(s.token, t, "Second", 5900);
  EXPECT_EQ(ack.elapsed_ms, 6200);
  EXPECT_FALSE(ack.duplicate);
  const auto votes = stored_votes();
  ASSERT_EQ(votes.size(), 1u);
  EXPECT_EQ(votes[0].judge_id, "human");
  EXPECT_EQ(votes[0].annotator, "s001");
  EXPECT_EQ(votes[0].source, JudgeKind::kHuman);
  EXPECT_EQ(votes[0].elapsed_ms, 6200);
  EXPECT_EQ(votes[0].client_elapsed_ms, 5900);
  EXPECT_EQ(*votes[0].choice, Choice::kSecond);
}

TEST_F(ServiceTest, DoubleSubmitIsIdempotent) {
  VotingService svc(store_, options());
  const auto s = svc.create_session("s001", "human-run", 4);
  const auto t = svc.next_task(s.token).task->task_id;
  svc.submit_vote(s.token, t, "First", std::nullopt);
  const auto again = svc.submit_vote(s.token, t, "Tie", std::nullopt);
  EXPECT_TRUE(again.duplicate);
  EXPECT_EQ(again.choice, Choice::kFirst);
  EXPECT_EQ(stored_votes().size(), 1u);
}

TEST_F(ServiceTest, NotFamiliarIsStoredThenFiltered) {
  VotingService svc(store_, options());
  const auto s = svc.create_session("s001", "human-run", 4);
  const auto t = svc.next_task(s.token).task->task_id;
  clock_ += 9000;
  svc.submit_vote(s.token, t, "NotFamiliar", std::nullopt);
  const auto votes = stored_votes();
  ASSERT_EQ(votes.size(), 1u);
  EXPECT_EQ(*votes[0].choice, Choice::kNotFamiliar);
  EXPECT_TRUE(filter_votes(votes, FilterPolicy{}).empty());
}

TEST_F(ServiceTest, MalformedChoiceAndUnassignedTask) {
  VotingService svc(store_, options());
  const auto s = svc.create_session("s001", "human-run", 4);
  const auto t = svc.next_task(s.token).task->task_id;
  EXPECT_THROW(svc.submit_vote(s.token, t, "Answer3", std::nullopt), ValidationError);
  EXPECT_THROW(svc.submit_vote(s.token, tasks_[3].id, "Tie", std::nullopt), ConflictError);
  EXPECT_THROW(svc.submit_vote(s.token, "no-such-task", "Tie", std::nullopt), NotFoundError);
  EXPECT_THROW(svc.next_task("bogus"), AuthError);
  EXPECT_THROW(svc.progress("bogus"), AuthError);
}

TEST_F(ServiceTest, ResumeRestoresProgressAcrossRestarts) {
  std::string token;
  {
    VotingService svc(store_, options());
    const auto s = svc.create_session("s001", "human-run", 3);
    token = s.token;
    for (int i = 0; i < 2; ++i) {
      const auto t = svc.next_task(s.token).task->task_id;
      svc.submit_vote(s.token, t, "Tie", std::nullopt);
    }
    const auto again = svc.create_session("s001", "human-run", 3);
    EXPECT_EQ(again.token, s.token);
    EXPECT_EQ(again.done, 2);
  }
  VotingService restarted(store_, options());
  const auto s = restarted.create_session("s001", "human-run", 3);
  EXPECT_EQ(s.done, 2);
  const auto p = restarted.progress(s.token);
  EXPECT_EQ(p.done, 2);
  EXPECT_EQ(p.remaining, 2u);
  EXPECT_EQ(p.total, 4u);
  const auto t = restarted.next_task(s.token).task->task_id;
  restarted.submit_vote(s.token, t, "First", std::nullopt);
  EXPECT_EQ(restarted.next_task(s.token).status, NextTask::Status::kDone);
}

TEST_F(ServiceTest, SessionsNeverShareATaskAndExpiredAssignmentsReturn) {
  VotingService svc(store_, options());
  const auto a = svc.create_session("a", "human-run", 4);
  const auto b = svc.create_session("b", "human-run", 4);
  std::set<std::string> served;
  served.insert(svc.next_task(a.token).task->task_id);
  served.insert(svc.next_task(b.token).task->task_id);
  EXPECT_EQ(served.size(), 2u);

  const auto c = svc.create_session("c", "human-run", 4);
  served.insert(svc.next_task(c.token).task->task_id);
  const auto d = svc.create_session("d", "human-run", 4);
  served.insert(svc.next_task(d.token).task->task_id);
  EXPECT_EQ(served.size(), 4u);
  const auto e = svc.create_session("e", "human-run", 4);
  EXPECT_EQ(svc.next_task(e.token).status, NextTask::Status::kWait);

  clock_ += 31 * 60 * 1000;
  const auto reclaimed = svc.next_task(e.token);
  ASSERT_EQ(reclaimed.status, NextTask::Status::kTask);
  EXPECT_TRUE(served.contains(reclaimed.task->task_id));
}

TEST_F(ServiceTest, UnknownRunAndBadTarget) {
  VotingService svc(store_, options());
  EXPECT_THROW(svc.create_session("s", "missing", 3), NotFoundError);
  EXPECT_THROW(svc.create_session("s", "human-run", 0), ValidationError);
  EXPECT_THROW(svc.create_session("", "human-run", 3), ValidationError);
}

TEST_F(ServiceTest, ElapsedIsMonotoneAndNonNegative) {
  VotingService svc(store_, options());
  const auto s = svc.create_session("s001", "human-run", 4);
  std::int64_t last_stamp = 0;
  for (int i = 0; i < 4; ++i) {
    const auto t = svc.next_task(s.token).task->task_id;
    clock_ += 100 * (i + 1);
    EXPECT_GE(svc.submit_vote(s.token, t, "Tie", std::nullopt).elapsed_ms, 0);
  }
  for (const auto& v : stored_votes()) {
    EXPECT_GT(v.timestamp_ms, last_stamp);
    last_stamp = v.timestamp_ms;
  }
}

// Minimal structural check against the shipped schema: required members
// present, no undeclared members, primitive types and enums respected.
void expect_conforms(const Json& value, const Json& schema, const Json& root,
                     const std::string& where) {
  if (schema.contains("$ref")) {
    const auto ref = schema["$ref"].get<std::string>();
    const auto name = ref.substr(ref.rfind('/') + 1);
    expect_conforms(value, root.at("definitions").at(name), root, where);
    return;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    EXPECT_TRUE(found) << where << ": " << value.dump();
    return;
  }
  const auto type = schema.value("type", "");
  if (type == "string") {
    EXPECT_TRUE(value.is_string()) << where;
  } else if (type == "integer") {
    EXPECT_TRUE(value.is_number_integer()) << where;
  } else if (type == "boolean") {
    EXPECT_TRUE(value.is_boolean()) << where;
  } else if (type == "object") {
    ASSERT_TRUE(value.is_object()) << where;
    for (const auto& r : schema.value("required", Json::array())) {
      EXPECT_TRUE(value.contains(r.get<std::string>())) << where << " lacks " << r;
    }
    const auto props = schema.value("properties", Json::object());
    for (const auto& [k, v] : value.items()) {
      ASSERT_TRUE(props.contains(k)) << where << " has undeclared member " << k;
      expect_conforms(v, props[k], root, where + "." + k);
    }
  }
}

class HttpServiceTest : public ServiceTest {
 protected:
  void SetUp() override {
    fs::create_directories(dir_.path() / "ui");
    std::ofstream(dir_.path() / "ui" / "index.html") << "<!doctype html><title>vote</title>";
    service_ = std::make_unique<VotingService>(store_, options());
    HttpOptions http;
    http.static_dir = dir_.path() / "ui";
    frontend_ = std::make_unique<HttpFrontend>(*service_, http);
    port_ = frontend_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { frontend_->serve(); });
    frontend_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    std::ifstream in(std::string(JUDGEPROBE_SOURCE_DIR) + "/schema/service_api.v1.json");
    schema_ = Json::parse(in);
  }
  void TearDown() override {
    frontend_->stop();
    thread_.join();
  }

  httplib::Headers auth(const std::string& token) {
    return {{"Authorization", "Bearer " + token}};
  }

  std::unique_ptr<VotingService> service_;
  std::unique_ptr<HttpFrontend> frontend_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
  Json schema_;
};

TEST_F(HttpServiceTest, FullVotingFlowMatchesSchema) {
  const auto& defs = schema_.at("definitions");
  auto res = client_->Post("/api/sessions",
                           R"({"judge_id":"s042","run_id":"human-run","target":2})",
                           "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const auto session = Json::parse(res->body);
  expect_conforms(session, defs.at("session"), schema_, "session");
  const auto token = session.at("token").get<std::string>();

  for (int i = 0; i < 2; ++i) {
    res = client_->Get("/api/tasks/next", auth(token));
    ASSERT_EQ(res->status, 200);
    const auto next = Json::parse(res->body);
    expect_conforms(next, defs.at("next_task"), schema_, "next_task");
    ASSERT_EQ(next.at("status"), "task");
    for (const char* hidden : {"group", "order", "kind", "perturbation", "generator", "sample_id"}) {
      EXPECT_EQ(res->body.find(std::string("\"") + hidden + "\""), std::string::npos) << hidden;
    }
    const Json vote{{"task_id", next.at("task").at("task_id")},
                    {"choice", "Tie"},
                    {"client_elapsed_ms", 7000}};
    res = client_->Post("/api/votes", auth(token), vote.dump(), "application/json");
    ASSERT_EQ(res->status, 200) << res->body;
    expect_conforms(Json::parse(res->body), defs.at("vote_ack"), schema_, "vote_ack");
  }
  res = client_->Get("/api/tasks/next", auth(token));
  EXPECT_EQ(Json::parse(res->body), (Json{{"status", "done"}}));

  res = client_->Get("/api/progress", auth(token));
  ASSERT_EQ(res->status, 200);
  const auto progress = Json::parse(res->body);
  expect_conforms(progress, defs.at("progress"), schema_, "progress");
  EXPECT_EQ(progress.at("done"), 2);
}

TEST_F(HttpServiceTest, ErrorsCarryClassAndStatus) {
  const auto& defs = schema_.at("definitions");
  auto res = client_->Get("/api/tasks/next", auth("not-a-token"));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  expect_conforms(Json::parse(res->body), defs.at("error"), schema_, "error");
  EXPECT_EQ(Json::parse(res->body).at("error_class"), "AuthError");

  res = client_->Get("/api/tasks/next");
  EXPECT_EQ(res->status, 401);

  res = client_->Post("/api/sessions", R"({"judge_id":"x","run_id":"nope","target":1})",
                      "application/json");
  EXPECT_EQ(res->status, 404);

  res = client_->Post("/api/sessions", "not json", "application/json");
  EXPECT_EQ(res->status, 400);

  res = client_->Post("/api/sessions", R"({"judge_id":"x","run_id":"human-run","target":1})",
                      "application/json");
  const auto token = Json::parse(res->body).at("token").get<std::string>();
  const auto task = Json::parse(client_->Get("/api/tasks/next", auth(token))->body)["task"]["task_id"];
  res = client_->Post("/api/votes", auth(token), Json{{"task_id", task}, {"choice", "Both"}}.dump(),
                      "application/json");
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(Json::parse(res->body).at("error_class"), "ValidationError");
}

TEST_F(HttpServiceTest, StaticMountAndVersion) {
  auto res = client_->Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("vote"), std::string::npos);
  res = client_->Get("/api/version");
  EXPECT_EQ(Json::parse(res->body).at("api_version"), schema_.at("api_version"));
}

TEST(SchemaFile, DeclaresEveryEndpoint) {
  std::ifstream in(std::string(JUDGEPROBE_SOURCE_DIR) + "/schema/service_api.v1.json");
  const auto schema = Json::parse(in);
  EXPECT_EQ(schema.at("api_version"), kServiceApiVersion);
  for (const char* e : {"POST /api/sessions", "GET /api/tasks/next", "POST /api/votes",
                        "GET /api/progress"}) {
    EXPECT_TRUE(schema.at("endpoints").contains(e)) << e;
  }
  // The task payload must not declare any field that would unblind a judge.
  const auto props = schema.at("definitions").at("task").at("properties");
  EXPECT_EQ(props.size(), 4u);
}

}  // namespace
}  // namespace judgeprobe
