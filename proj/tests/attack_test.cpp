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

#include "judgeprobe/attack.hpp"
#include "judgeprobe/errors.hpp"
#include "testing.hpp"

#include <map>

namespace judgeprobe {
namespace {

std::vector<Question> questions(int n) {
  std::vector<Question> out;
  const char* topics[] = {"volcanoes", "friction", "the moon", "rainbows", "photosynthesis"};
  for (int i = 0; i < n; ++i) {
    out.push_back(testing::verified_question(
        "What do you know about " + std::string(topics[i % 5]) + " (case " + std::to_string(i) + ")?",
        kAllBloomLevels[i % 6]));
  }
  return out;
}

class AttackTest : public ::testing::Test {
 protected:
  GenerationContext context(StubChatTransport& t, const std::string& id) {
    GenerationContext ctx;
    ctx.transport = &t;
    ctx.config.id = id;
    ctx.config.stub = true;
    ctx.seed = 3;
    ctx.fan_out = 2;
    return ctx;
  }
  StubChatTransport anchor_t_{"anchor", 3};
  StubChatTransport perturb_t_{"perturber", 3};
  StubChatTransport weak1_t_{"weak-7b", 3};
  StubChatTransport weak2_t_{"weak-13b", 3};
  StubChatTransport weak3_t_{"weak-70b", 3};
};

const std::vector<PerturbationKind> kDeceptions{PerturbationKind::kFakeReference,
                                                PerturbationKind::kRichContent,
                                                PerturbationKind::kCompound};

TEST_F(AttackTest, Rq1SixtyQuestionsThreeDeceptions) {
  const auto qs = questions(60);
  const auto e = build_rq1(qs, context(anchor_t_, "anchor"), context(perturb_t_, "perturber"),
                           PerturbationKind::kFactualError, kDeceptions);
  EXPECT_EQ(e.anchors.size(), 60u);
  ASSERT_EQ(e.weak_sets.size(), 1u);
  EXPECT_EQ(e.weak_sets[0].answers.size(), 60u);
  EXPECT_EQ(e.weak_sets[0].recipe, WeaknessRecipe::injected_flaw(PerturbationKind::kFactualError));
  EXPECT_EQ(e.perturbed.size(), 180u);
  EXPECT_EQ(e.columns.size(), 3u);
  EXPECT_TRUE(e.random_baseline);
  EXPECT_NO_THROW(validate_experiment(e));

  const auto round = Json(e).get<AttackExperiment>();
  EXPECT_EQ(round, e);
}

TEST_F(AttackTest, Rq1WithoutDeceptionsHasControlsOnly) {
  const auto e = build_rq1(questions(4), context(anchor_t_, "anchor"),
                           context(perturb_t_, "perturber"), PerturbationKind::kGenderBias, {});
  EXPECT_TRUE(e.perturbed.empty());
  EXPECT_TRUE(e.columns.empty());
  const auto plan = plan_attack(e, 1, 1);
  EXPECT_EQ(plan.tasks.size(), 4u * 2u);
  for (const auto& t : plan.tasks) EXPECT_EQ(t.group, Group::kControl);
}

TEST_F(AttackTest, Rq1RejectsAgnosticFlaw) {
  EXPECT_THROW(build_rq1(questions(2), context(anchor_t_, "anchor"),
                         context(perturb_t_, "perturber"), PerturbationKind::kFakeReference,
                         kDeceptions),
               ValidationError);
}

TEST_F(AttackTest, Rq2AddsAnchorAsWeakColumn) {
  const auto qs = questions(5);
  const std::vector<GenerationContext> weak{context(weak1_t_, "LM-7B"), context(weak2_t_, "LM-13B"),
                                            context(weak3_t_, "LM-70B")};
  const auto e = build_rq2(qs, context(anchor_t_, "anchor"), weak, context(perturb_t_, "perturber"));
  ASSERT_EQ(e.weak_sets.size(), 4u);
  EXPECT_EQ(e.columns.size(), 4u);
  EXPECT_EQ(e.perturbed.size(), 20u);
  EXPECT_EQ(e.weak_sets.back().recipe, WeaknessRecipe::weaker_generator("anchor"));
  for (const auto& c : e.columns) EXPECT_EQ(c.deception, PerturbationKind::kFakeReference);

  const std::vector<GenerationContext> one{context(weak1_t_, "LM-7B")};
  EXPECT_EQ(build_rq2(qs, context(anchor_t_, "anchor"), one, context(perturb_t_, "perturber"))
                .columns.size(),
            2u);
  EXPECT_THROW(build_rq2(qs, context(anchor_t_, "anchor"), {}, context(perturb_t_, "perturber")),
               ValidationError);
}

TEST_F(AttackTest, OracleIgnoringDressingHasZeroAsrEverywhere) {
  const auto e = build_rq1(questions(12), context(anchor_t_, "anchor"),
                           context(perturb_t_, "perturber"), PerturbationKind::kFactualError,
                           kDeceptions);
  const auto plan = plan_attack(e, 1, 9);
  OracleTable table;
  for (const auto& s : plan.samples) table.set(s.id, Preference::kA1);
  const std::vector<JudgeSpec> judges{
      {"oracle", ScriptedJudge{ScriptedPolicy::oracle(table), 9}, CotMode::kNone}};
  const auto result = run_attack(e, judges, 1, 9);
  ASSERT_EQ(result.judges.size(), 2u);  // oracle + random baseline
  EXPECT_EQ(result.judges.back().judge_id, "Random");
  for (const auto& c : result.judges[0].columns) {
    ASSERT_TRUE(c.asr().has_value());
    EXPECT_EQ(*c.asr(), 0.0);
    EXPECT_EQ(c.base, 12u);
  }
}

TEST_F(AttackTest, IdentityPerturbationGivesZeroForDeterministicJudge) {
  auto e = build_rq1(questions(10), context(anchor_t_, "anchor"), context(perturb_t_, "perturber"),
                     PerturbationKind::kFactualError, kDeceptions);
  std::map<std::string, std::string> parent_text;
  for (const auto& a : e.weak_sets[0].answers) parent_text[a.id] = a.text;
  for (auto& p : e.perturbed) p.text = parent_text.at(*p.parent_answer_id);
  e.random_baseline = false;
  const std::vector<JudgeSpec> judges{
      {"longer", ScriptedJudge{ScriptedPolicy::longer_wins(), 0}, CotMode::kNone}};
  const auto result = run_attack(e, judges, 1, 2);
  ASSERT_EQ(result.judges.size(), 1u);
  for (const auto& c : result.judges[0].columns) {
    if (c.asr()) EXPECT_EQ(*c.asr(), 0.0);
  }
}

TEST_F(AttackTest, WeakShareTableAndRanking) {
  const auto qs = questions(6);
  const std::vector<GenerationContext> weak{context(weak1_t_, "LM-7B")};
  const auto e = build_rq2(qs, context(anchor_t_, "anchor"), weak, context(perturb_t_, "perturber"));
  const std::vector<JudgeSpec> judges{
      {"longer", ScriptedJudge{ScriptedPolicy::longer_wins(), 0}, CotMode::kNone},
      {"tie", ScriptedJudge{ScriptedPolicy::constant(Choice::kTie), 0}, CotMode::kNone}};
  const auto result = run_attack(e, judges, 1, 4);
  const auto share = result.weak_share_table();
  EXPECT_EQ(share.header.size(), 1u + 3u * 2u);
  ASSERT_EQ(share.rows.size(), 3u);
  // The constant-Tie judge sends every control vote to the tie column.
  EXPECT_EQ(share.rows[1][0], "tie");
  EXPECT_EQ(share.rows[1][2], "1.000");
  for (const auto& j : result.judges) {
    std::uint64_t total = 0;
    for (const auto& s : j.weak_share) total += s.total();
    EXPECT_EQ(total, 6u * 2u * 2u);
  }
  const auto ranking = result.ranking();
  if (ranking) {
    EXPECT_EQ(ranking->columns, result.column_labels);
    EXPECT_EQ(ranking->rows.size(), 3u);
  }
  EXPECT_EQ(result.asr_table().rows.size(), 3u);
}

TEST(WeaknessRecipe, InjectedFlawMustBeSemantic) {
  EXPECT_THROW(WeaknessRecipe::injected_flaw(PerturbationKind::kRichContent), ValidationError);
  EXPECT_EQ(parse_research_question("RQ2"), ResearchQuestion::kRQ2);
}

}  // namespace
}  // namespace judgeprobe
