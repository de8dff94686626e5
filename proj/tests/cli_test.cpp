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

#include <sstream>

#include <nlohmann/json.hpp>

#include "judgeprobe/cli.hpp"
#include "pipeline.hpp"
#include "testing.hpp"

namespace judgeprobe {
namespace {

using testing::run_cli;
using testing::slurp;
using testing::TempDir;

struct InProcess {
  int status;
  std::string out;
  std::string err;
};

InProcess call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run_command(args, out, err);
  return {status, out.str(), err.str()};
}

const std::string kFixtures = std::string(JUDGEPROBE_SOURCE_DIR) + "/tests/fixtures/";

TEST(Cli, RankingFromPublishedMatrix) {
  const auto r = call({"report", "ranking", "--asr-matrix", kFixtures + "table2_asr.csv",
                       "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  bool found = false;
  while (std::getline(lines, line)) {
    if (line.rfind("GPT-4,", 0) == 0) {
      found = true;
      EXPECT_TRUE(line.ends_with("4.75")) << line;
    }
  }
  EXPECT_TRUE(found) << r.out;
}

TEST(Cli, UnknownFlagIsUsageError) {
  const auto r = call({"report", "asr", "--no-such-flag"});
  EXPECT_EQ(r.status, 2);
  const auto err = nlohmann::json::parse(r.err);
  EXPECT_TRUE(err.contains("error_class"));
  EXPECT_TRUE(err.contains("message"));
}

TEST(Cli, MissingRunIsNotFound) {
  TempDir dir("cli-missing");
  const auto r = call({"--out", dir.path().string(), "--run", "nope", "report", "asr"});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error_class"), "NotFoundError");
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(call({"--help"}).status, 0);
}

TEST(Cli, OfflinePipelineIsReproducible) {
  TempDir a("cli-a");
  TempDir b("cli-b");
  const auto ra = testing::run_offline_pipeline(a.path(), "7", "SOURCE_DATE_EPOCH=0");
  ASSERT_TRUE(ra.ok) << ra.failed_step << ": " << ra.last.err;
  const auto rb = testing::run_offline_pipeline(b.path(), "7", "SOURCE_DATE_EPOCH=0");
  ASSERT_TRUE(rb.ok) << rb.failed_step << ": " << rb.last.err;

  const auto run_a = a.path() / "runs" / ra.run_id;
  const auto run_b = b.path() / "runs" / rb.run_id;
  for (const char* f : {"votes.ndjson", "tasks.ndjson", "manifest.ndjson", "aggregates.ndjson",
                        "reports.ndjson"}) {
    const auto va = slurp(run_a / f);
    EXPECT_FALSE(va.empty()) << f;
    EXPECT_EQ(va, slurp(run_b / f)) << f;
  }
  EXPECT_EQ(ra.last.out, rb.last.out);
  EXPECT_NE(slurp(run_a / "manifest.ndjson").find("1970-01-01T00:00:00Z"), std::string::npos);
}

TEST(Cli, RepeatedJudgeRunSkipsVotedTasks) {
  TempDir dir("cli-resume");
  const auto r = testing::run_offline_pipeline(dir.path(), "3", "");
  ASSERT_TRUE(r.ok) << r.failed_step << ": " << r.last.err;
  const auto before = slurp(dir.path() / "runs" / r.run_id / "votes.ndjson");
  const auto again = run_cli(dir.path(), {"--out", dir.path().string(), "--seed", "3", "--run",
                                          r.run_id, "judge", "run", "--judge", "scripted:random",
                                          "--judge-id", "random"});
  ASSERT_EQ(again.status, 0) << again.err;
  EXPECT_EQ(nlohmann::json::parse(again.out).at("votes"), 0);
  EXPECT_EQ(slurp(dir.path() / "runs" / r.run_id / "votes.ndjson"), before);
}

TEST(Cli, BinaryReportsErrorRecord) {
  TempDir dir("cli-bin");
  const auto r = run_cli(dir.path(), {"--out", dir.path().string(), "schedule", "--dataset",
                                      "deadbeef"});
  EXPECT_NE(r.status, 0);
  const auto err = nlohmann::json::parse(r.err);
  EXPECT_TRUE(err.at("error_class").is_string());
}

}  // namespace
}  // namespace judgeprobe
