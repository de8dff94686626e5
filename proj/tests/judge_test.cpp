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

#include <map>
#include <set>

#include "judgeprobe/aggregation.hpp"
#include "judgeprobe/errors.hpp"
#include "judgeprobe/judge.hpp"
#include "testing.hpp"

namespace judgeprobe {
namespace {

using testing::synthetic_sample;
using testing::synthetic_samples;

TEST(Schedule, OneSampleThreeVotesPerOrder) {
  const std::vector<Sample> samples{synthetic_sample(0, PerturbationKind::kFakeReference)};
  const auto tasks = build_schedule(samples, 3, 1);
  EXPECT_EQ(tasks.size(), 12u);
}

TEST(Schedule, ExperimentalOnlyWithFortyFive) {
  const std::vector<Sample> samples{synthetic_sample(0, PerturbationKind::kFakeReference)};
  const std::vector<Group> exp{Group::kExperimental};
  const auto tasks = build_schedule(samples, 45, 1, exp);
  EXPECT_EQ(tasks.size(), 90u);
  for (const auto& t : tasks) EXPECT_EQ(t.group, Group::kExperimental);
}

TEST(Schedule, SameSeedSameSequenceAndDifferentSeedPermutes) {
  const auto samples = synthetic_samples(20, PerturbationKind::kRichContent);
  const auto a = build_schedule(samples, 3, 42);
  EXPECT_EQ(a, build_schedule(samples, 3, 42));
  const auto b = build_schedule(samples, 3, 43);
  EXPECT_NE(a, b);
  std::multiset<std::string> ia, ib;
  for (const auto& t : a) ia.insert(t.id);
  for (const auto& t : b) ib.insert(t.id);
  EXPECT_EQ(ia, ib);
}

TEST(Schedule, BalancedPerSampleAndGroup) {
  const auto samples = synthetic_samples(15, PerturbationKind::kGenderBias);
  const auto tasks = build_schedule(samples, 4, 9);
  std::map<std::pair<std::string, Group>, std::pair<int, int>> counts;
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    auto& c = counts[{t.sample_id, t.group}];
    (t.order == Order::kA1First ? c.first : c.second)++;
    EXPECT_EQ(t.id, task_id_for(t.sample_id, t.group, t.order, t.round));
    ids.insert(t.id);
  }
  EXPECT_EQ(ids.size(), tasks.size());
  EXPECT_EQ(counts.size(), 30u);
  for (const auto& [key, c] : counts) {
    EXPECT_EQ(c.first, 4);
    EXPECT_EQ(c.second, 4);
  }
}

TEST(Schedule, RejectsZeroVotes) {
  const auto samples = synthetic_samples(1, PerturbationKind::kGenderBias);
  EXPECT_THROW(build_schedule(samples, 0, 1), ValidationError);
}

TEST(ParseVerdict, LastLineForCotAndNone) {
  EXPECT_EQ(parse_verdict("Answer 1 lists facts.\nAnswer2", CotMode::kCotFirst), Choice::kSecond);
  EXPECT_EQ(parse_verdict("Tie", CotMode::kNone), Choice::kTie);
  EXPECT_EQ(parse_verdict("reasoning\n\n  **answer1**.  \n\n", CotMode::kNone), Choice::kFirst);
}

TEST(ParseVerdict, FirstLineForAnswerFirst) {
  EXPECT_EQ(parse_verdict("Answer1\nBecause it is accurate; Answer2 is not.", CotMode::kAnswerFirst),
            Choice::kFirst);
}

TEST(ParseVerdict, AmbiguousOrMissingIsAnError) {
  EXPECT_THROW(parse_verdict("Answer1 and Answer2 are both fine", CotMode::kNone),
               VerdictParseError);
  EXPECT_THROW(parse_verdict("I cannot decide.", CotMode::kNone), VerdictParseError);
  EXPECT_THROW(parse_verdict("", CotMode::kCotFirst), VerdictParseError);
}

TEST(ParseVerdict, RoundTripsEveryChoiceUnderEveryMode) {
  const std::map<Choice, std::string> token{
      {Choice::kFirst, "Answer1"}, {Choice::kSecond, "Answer2"}, {Choice::kTie, "Tie"}};
  for (auto mode : {CotMode::kNone, CotMode::kCotFirst, CotMode::kAnswerFirst}) {
    for (const auto& [choice, tok] : token) {
      const std::string response = mode == CotMode::kAnswerFirst
                                       ? tok + "\nExplanation follows."
                                       : (mode == CotMode::kCotFirst ? "Explanation.\n" + tok : tok);
      EXPECT_EQ(parse_verdict(response, mode), choice);
    }
  }
}

JudgeSpec scripted(ScriptedPolicy p, std::uint64_t seed = 1) {
  return JudgeSpec{"j", ScriptedJudge{std::move(p), seed}, CotMode::kNone};
}

TEST(RunScripted, OracleExpressesPreferenceUnderOrder) {
  const Sample s = synthetic_sample(0, PerturbationKind::kFakeReference);
  OracleTable table;
  table.set(s.id, Preference::kA2);
  const auto judge = scripted(ScriptedPolicy::oracle(table));
  const ComparisonTask t{"t", s.id, Group::kControl, Order::kA2First, 1};
  EXPECT_EQ(*run_scripted(judge, t, present(t, s)).choice, Choice::kFirst);
  const ComparisonTask u{"u", s.id, Group::kControl, Order::kA1First, 1};
  EXPECT_EQ(*run_scripted(judge, u, present(u, s)).choice, Choice::kSecond);
}

TEST(RunScripted, OracleIsOrderInvariantAtPreferenceLevel) {
  const auto samples = synthetic_samples(6, PerturbationKind::kRichContent);
  OracleTable table;
  const Preference prefs[] = {Preference::kA1, Preference::kTie, Preference::kA2};
  for (std::size_t i = 0; i < samples.size(); ++i) table.set(samples[i].id, prefs[i % 3]);
  const auto judge = scripted(ScriptedPolicy::oracle(table));
  const SampleIndex index(samples);
  for (const auto& t : build_schedule(samples, 2, 5)) {
    const auto v = run_scripted(judge, t, present(t, index.at(t.sample_id)));
    const int halves = slot_score_halves(*v.choice, t.order);
    EXPECT_EQ(preference_from_halves(halves, 1), *table.lookup(t.sample_id, t.group));
  }
}

TEST(RunScripted, OracleMissingEntryIsAnError) {
  const Sample s = synthetic_sample(0, PerturbationKind::kFakeReference);
  const auto judge = scripted(ScriptedPolicy::oracle(OracleTable{}));
  const ComparisonTask t{"t", s.id, Group::kControl, Order::kA1First, 1};
  EXPECT_THROW(run_scripted(judge, t, present(t, s)), NotFoundError);
}

TEST(RunScripted, ConstantAndLongerWins) {
  const Sample s = synthetic_sample(0, PerturbationKind::kFakeReference);
  for (auto order : {Order::kA1First, Order::kA2First}) {
    const ComparisonTask t{"t", s.id, Group::kControl, order, 1};
    const auto shown = present(t, s);
    EXPECT_EQ(*run_scripted(scripted(ScriptedPolicy::constant(Choice::kFirst)), t, shown).choice,
              Choice::kFirst);
    // a2 is the longer raw answer in the synthetic samples.
    EXPECT_EQ(*run_scripted(scripted(ScriptedPolicy::longer_wins()), t, shown).choice,
              order == Order::kA2First ? Choice::kFirst : Choice::kSecond);
  }
}

TEST(RunScripted, UniformRandomFrequencies) {
  const Sample s = synthetic_sample(0, PerturbationKind::kFakeReference);
  const auto policy = ScriptedPolicy::uniform_random();
  std::map<Choice, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const ComparisonTask t{"task-" + std::to_string(i), s.id, Group::kControl, Order::kA1First, 1};
    counts[scripted_choice(policy, 2024, t, present(t, s))]++;
  }
  for (auto c : {Choice::kFirst, Choice::kSecond, Choice::kTie}) {
    EXPECT_NEAR(counts[c] / static_cast<double>(n), 1.0 / 3.0, 0.02) << to_string(c);
  }
}

TEST(RunScripted, PureFunctionOfSeedAndTask) {
  const auto samples = synthetic_samples(10, PerturbationKind::kFakeReference);
  const auto tasks = build_schedule(samples, 3, 1);
  const SampleIndex index(samples);
  const auto judge = scripted(ScriptedPolicy::flip(ScriptedPolicy::uniform_random(), 0.3), 77);
  const auto a = run_judge(judge, tasks, index);
  std::vector<ComparisonTask> reversed(tasks.rbegin(), tasks.rend());
  const auto b = run_judge(judge, reversed, index);
  std::map<std::string, Vote> by_id;
  for (const auto& v : b.votes) by_id[v.task_id] = v;
  for (const auto& v : a.votes) EXPECT_EQ(v, by_id.at(v.task_id));
}

TEST(RunScripted, FlipWithProbabilityOneSwapsPositions) {
  const Sample s = synthetic_sample(0, PerturbationKind::kFakeReference);
  const ComparisonTask t{"t", s.id, Group::kControl, Order::kA1First, 1};
  const auto shown = present(t, s);
  const auto flip = ScriptedPolicy::flip(ScriptedPolicy::constant(Choice::kFirst), 1.0);
  EXPECT_EQ(scripted_choice(flip, 0, t, shown), Choice::kSecond);
  const auto tie = ScriptedPolicy::flip(ScriptedPolicy::constant(Choice::kTie), 1.0);
  EXPECT_EQ(scripted_choice(tie, 0, t, shown), Choice::kTie);
}

TEST(RunJudge, HumanJudgesAreRejected) {
  const auto samples = synthetic_samples(1, PerturbationKind::kFakeReference);
  const SampleIndex index(samples);
  const JudgeSpec human{"h", HumanJudge{}, CotMode::kNone};
  EXPECT_THROW(run_judge(human, build_schedule(samples, 1, 1), index), UsageError);
}

}  // namespace
}  // namespace judgeprobe
