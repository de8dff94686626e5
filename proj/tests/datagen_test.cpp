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

#include <set>

#include "judgeprobe/datagen.hpp"
#include "judgeprobe/errors.hpp"
#include "testing.hpp"

namespace judgeprobe {
namespace {

constexpr std::string_view kFeResponse = R"(Sure, here is the rewrite.
```fact
- Water boils at 100 degrees Celsius at sea level.
- The Pacific is the largest ocean.
```
```error
- Water boils at 90 degrees Celsius at sea level.
- The Atlantic is the largest ocean.
```
```answer
Water boils at 90 degrees Celsius at sea level, and the Atlantic is the largest ocean.
```
Let me know if you need anything else.)";

constexpr std::string_view kGenderResponse = R"(```points
- Attribute the discovery to men only.
```
```answer
Only men have made real progress in this field.
```)";

TEST(StructuredPerturbation, FactualErrorBlocks) {
  const auto p = parse_structured_perturbation(PerturbationKind::kFactualError, kFeResponse);
  EXPECT_EQ(p.text,
            "Water boils at 90 degrees Celsius at sea level, and the Atlantic is the largest ocean.");
  ASSERT_EQ(p.changes.size(), 2u);
  EXPECT_EQ(p.changes[0], "Water boils at 90 degrees Celsius at sea level.");
}

TEST(StructuredPerturbation, GenderPoints) {
  const auto p = parse_structured_perturbation(PerturbationKind::kGenderBias, kGenderResponse);
  EXPECT_EQ(p.text, "Only men have made real progress in this field.");
  ASSERT_EQ(p.changes.size(), 1u);
  EXPECT_EQ(p.changes[0], "Attribute the discovery to men only.");
}

TEST(StructuredPerturbation, MissingAnswerBlockKeepsRawResponse) {
  const std::string raw = "I rewrote it: water boils at 90 degrees.";
  try {
    parse_structured_perturbation(PerturbationKind::kFactualError, raw);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.raw_response(), raw);
  }
}

TEST(StructuredPerturbation, RejectsSemanticAgnosticKinds) {
  EXPECT_THROW(parse_structured_perturbation(PerturbationKind::kFakeReference, kFeResponse),
               ValidationError);
}

TEST(QuestionResponse, FencedOrBareJson) {
  const auto a = parse_question_response(BloomLevel::kApplying,
                                         "```json\n{\"Applying\": [\"Q1?\", \"Q2?\"]}\n```");
  EXPECT_EQ(a, (std::vector<std::string>{"Q1?", "Q2?"}));
  const auto b = parse_question_response(BloomLevel::kApplying, "{\"applying\": [\"Q3?\"]}");
  EXPECT_EQ(b, (std::vector<std::string>{"Q3?"}));
  EXPECT_THROW(parse_question_response(BloomLevel::kApplying, "Q1? Q2?"), ParseError);
}

TEST(SemanticPreservation, ToleratesFormattingButNotEdits) {
  const std::string original = "Rain forms when droplets merge.";
  EXPECT_TRUE(preserves_semantics(original, "## Key\n\n**Rain forms** when droplets merge.\n\n"
                                            "Reference: Doe (2020)."));
  EXPECT_FALSE(preserves_semantics(original, "Snow forms when droplets merge."));
}

std::vector<Question> drafts(int n) {
  std::vector<Question> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(make_question("Draft question " + std::to_string(i) + "?",
                                kAllBloomLevels[i % 6]));
  }
  return out;
}

TEST(IngestReview, RejectionsLeaveVerifiedSurvivors) {
  const auto questions = drafts(180);
  std::vector<ReviewDecision> decisions;
  for (int i = 0; i < 180; ++i) {
    decisions.push_back({questions[i].id, i < 38 ? ReviewVerdict::kReject : ReviewVerdict::kKeep,
                         std::nullopt, ""});
  }
  const auto out = ingest_review(decisions, questions);
  ASSERT_EQ(out.size(), 142u);
  for (const auto& q : out) {
    EXPECT_EQ(q.status, QuestionStatus::kVerified);
    EXPECT_TRUE(q.review.has_value());
  }
}

TEST(IngestReview, EmptyDecisionsLeaveEverythingDraft) {
  const auto questions = drafts(5);
  const auto out = ingest_review({}, questions);
  ASSERT_EQ(out.size(), 5u);
  for (const auto& q : out) EXPECT_EQ(q.status, QuestionStatus::kDraft);
}

TEST(IngestReview, UnknownIdIsAnError) {
  const auto questions = drafts(2);
  const std::vector<ReviewDecision> d{{"q-unknown", ReviewVerdict::kKeep, std::nullopt, ""}};
  EXPECT_THROW(ingest_review(d, questions), NotFoundError);
}

TEST(IngestReview, ReclassifyRelabels) {
  const auto questions = drafts(1);
  const std::vector<ReviewDecision> d{
      {questions[0].id, ReviewVerdict::kReclassify, BloomLevel::kCreating, "too hard"}};
  const auto out = ingest_review(d, questions);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].level, BloomLevel::kCreating);
  const std::vector<ReviewDecision> same{
      {questions[0].id, ReviewVerdict::kReclassify, questions[0].level, ""}};
  EXPECT_THROW(ingest_review(same, questions), ValidationError);
}

TEST(ReviewCsv, ParsesQuotedNotes) {
  const auto d = read_review_csv(
      "question_id,verdict,level,note\n"
      "q-1,keep,,\n"
      "q-2,reclassify,Analyzing,\"compares, contrasts\"\n"
      "q-3,reject,,off topic\n");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[1].verdict, ReviewVerdict::kReclassify);
  EXPECT_EQ(d[1].level, BloomLevel::kAnalyzing);
  EXPECT_EQ(d[1].note, "compares, contrasts");
  EXPECT_EQ(d[2].verdict, ReviewVerdict::kReject);
  EXPECT_THROW(read_review_csv("id,verdict\nq-1,keep\n"), ValidationError);
  EXPECT_THROW(read_review_csv("question_id,verdict,level,note\nq-1,reclassify,,\n"),
               ValidationError);
}

struct Staged {
  std::vector<Question> questions;
  std::vector<Answer> answers;
};

Staged staged(int n) {
  Staged out;
  for (int i = 0; i < n; ++i) {
    for (auto k : kAllPerturbationKinds) {
      const Sample s = testing::synthetic_sample(i, k);
      if (k == PerturbationKind::kFactualError) {
        out.questions.push_back(s.question);
        out.answers.push_back(s.a1);
        out.answers.push_back(s.a2);
      }
      out.answers.push_back(s.a2p);
    }
  }
  return out;
}

TEST(AssembleDataset, CountIsQuestionsTimesKinds) {
  const auto st = staged(142);
  const std::vector<PerturbationKind> four{
      PerturbationKind::kFactualError, PerturbationKind::kGenderBias,
      PerturbationKind::kFakeReference, PerturbationKind::kRichContent};
  const auto samples = assemble_dataset(st.questions, st.answers, four);
  EXPECT_EQ(samples.size(), 568u);
  for (const auto& s : samples) EXPECT_TRUE(validate_sample(s).empty());
}

TEST(AssembleDataset, SingleQuestionSingleKind) {
  const auto st = staged(1);
  const std::vector<PerturbationKind> ref{PerturbationKind::kFakeReference};
  EXPECT_EQ(assemble_dataset(st.questions, st.answers, ref).size(), 1u);
}

TEST(AssembleDataset, MissingRawAnswerIsAnAssemblyError) {
  auto st = staged(2);
  std::erase_if(st.answers, [&](const Answer& a) {
    return a.question_id == st.questions[1].id && a.variant == AnswerVariant::kRaw2;
  });
  const std::vector<PerturbationKind> ref{PerturbationKind::kFakeReference};
  try {
    assemble_dataset(st.questions, st.answers, ref);
    FAIL() << "expected AssemblyError";
  } catch (const AssemblyError& e) {
    EXPECT_NE(std::string(e.what()).find(st.questions[1].id), std::string::npos);
  }
}

class StubPipeline : public ::testing::Test {
 protected:
  GenerationContext context(StubChatTransport& t, std::uint64_t seed) {
    GenerationContext ctx;
    ctx.transport = &t;
    ctx.config.id = "stub";
    ctx.config.stub = true;
    ctx.seed = seed;
    ctx.fan_out = 2;
    return ctx;
  }
};

TEST_F(StubPipeline, EndToEndProducesValidSamples) {
  StubChatTransport t("stub", 11);
  const auto ctx = context(t, 11);
  const auto levels = std::vector<BloomLevel>(kAllBloomLevels.begin(), kAllBloomLevels.end());
  auto questions = generate_questions(ctx, levels, 3);
  ASSERT_TRUE(questions.failures.empty());
  EXPECT_EQ(questions.items.size(), 18u);
  std::vector<ReviewDecision> keep;
  for (const auto& q : questions.items) keep.push_back({q.id, ReviewVerdict::kKeep, {}, ""});
  const auto verified = ingest_review(keep, questions.items);
  const auto raw = generate_raw_answers(ctx, verified);
  ASSERT_TRUE(raw.failures.empty());
  EXPECT_EQ(raw.items.size(), 36u);
  const std::vector<PerturbationKind> kinds(kAllPerturbationKinds.begin(),
                                            kAllPerturbationKinds.end());
  const auto perturbed = perturb_answers(ctx, verified, raw.items, kinds);
  ASSERT_TRUE(perturbed.failures.empty());
  EXPECT_EQ(perturbed.items.size(), 18u * 5u);
  for (const auto& a : perturbed.items) {
    if (a.perturbation == PerturbationKind::kCompound) {
      EXPECT_EQ(a.stages.size(), 2u);
    }
  }
  std::vector<Answer> all = raw.items;
  all.insert(all.end(), perturbed.items.begin(), perturbed.items.end());
  const auto samples = assemble_dataset(verified, all, kinds);
  EXPECT_EQ(samples.size(), 90u);

  // The target coin flip is fixed per question across kinds.
  std::map<std::string, std::set<int>> flips;
  for (const auto& s : samples) flips[s.question.id].insert(s.target_flip);
  for (const auto& [q, f] : flips) EXPECT_EQ(f.size(), 1u) << q;
}

TEST_F(StubPipeline, DeterministicForSeed) {
  StubChatTransport t1("stub", 4), t2("stub", 4);
  const std::vector<BloomLevel> levels{BloomLevel::kAnalyzing};
  const auto a = generate_questions(context(t1, 4), levels, 5);
  const auto b = generate_questions(context(t2, 4), levels, 5);
  EXPECT_EQ(a.items, b.items);
}

class FailingTransport : public ChatTransport {
 public:
  std::string send(const ChatRequest&) override { return "no json here"; }
};

TEST(Generation, ParseFailuresAreCollectedNotThrown) {
  FailingTransport t;
  GenerationContext ctx;
  ctx.transport = &t;
  ctx.config.id = "broken";
  const std::vector<BloomLevel> levels{BloomLevel::kRemembering};
  const auto out = generate_questions(ctx, levels, 2);
  EXPECT_TRUE(out.items.empty());
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].error_class, "ParseError");
  EXPECT_EQ(out.failures[0].raw_response, "no json here");
}

}  // namespace
}  // namespace judgeprobe
