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

// Drives the judgeprobe binary through a complete offline run.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace judgeprobe::testing {

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

// Runs the binary with `env` prefixed assignments, e.g. "SOURCE_DATE_EPOCH=0".
inline CliResult run_cli(const std::filesystem::path& work, const std::vector<std::string>& args,
                         const std::string& env = "") {
  const auto out_file = work / ".cli-out";
  const auto err_file = work / ".cli-err";
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += shell_quote(JUDGEPROBE_CLI);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " >" + shell_quote(out_file.string()) + " 2>" + shell_quote(err_file.string());
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

struct PipelineRun {
  bool ok = false;
  std::string failed_step;
  CliResult last;
  std::string run_id;
};

// Generation through aggregation with stub generators and a scripted judge.
inline PipelineRun run_offline_pipeline(const std::filesystem::path& work, const std::string& seed,
                                        const std::string& env) {
  PipelineRun p;
  p.run_id = "r1";
  const std::vector<std::string> g{"--out", work.string(), "--seed", seed};
  auto step = [&](const std::string& name, std::vector<std::string> args) {
    args.insert(args.begin(), g.begin(), g.end());
    p.last = run_cli(work, args, env);
    if (p.last.status != 0) p.failed_step = name;
    return p.last.status == 0;
  };
  if (!step("gen questions", {"gen", "questions", "--generator", "stub", "--per-level", "2"}))
    return p;

  std::ofstream review(work / "review.csv");
  review << "question_id,verdict,level,note\n";
  std::ifstream qs(work / "staging" / "questions.ndjson");
  for (std::string line; std::getline(qs, line);) {
    if (line.empty()) continue;
    review << nlohmann::json::parse(line).at("id").get<std::string>() << ",keep,,\n";
  }
  review.close();

  if (!step("review", {"review", "ingest", "--file", (work / "review.csv").string()})) return p;
  if (!step("gen answers", {"gen", "answers", "--generator", "stub"})) return p;
  if (!step("gen perturb", {"gen", "perturb", "--generator", "stub"})) return p;
  if (!step("dataset", {"dataset", "assemble"})) return p;
  const auto hash = nlohmann::json::parse(p.last.out).at("dataset_hash").get<std::string>();
  const std::vector<std::string> run{"--run", p.run_id};
  auto run_step = [&](const std::string& name, std::vector<std::string> args) {
    args.insert(args.begin(), run.begin(), run.end());
    return step(name, std::move(args));
  };
  if (!run_step("schedule", {"schedule", "--dataset", hash, "--k", "3"})) return p;
  if (!run_step("judge", {"judge", "run", "--judge", "scripted:random", "--judge-id", "random"}))
    return p;
  if (!run_step("aggregate", {"aggregate", "--min-elapsed", "5000"})) return p;
  if (!run_step("report", {"report", "asr", "--format", "csv"})) return p;
  p.ok = true;
  return p;
}

}  // namespace judgeprobe::testing
