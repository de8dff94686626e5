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

#include "judgeprobe/model.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/hashing.hpp"

namespace judgeprobe {
namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<BloomLevel, 6> kBloomNames{{
    {BloomLevel::kRemembering, "Remembering"},
    {BloomLevel::kUnderstanding, "Understanding"},
    {BloomLevel::kApplying, "Applying"},
    {BloomLevel::kAnalyzing, "Analyzing"},
    {BloomLevel::kEvaluating, "Evaluating"},
    {BloomLevel::kCreating, "Creating"},
}};
constexpr NameTable<QuestionStatus, 3> kStatusNames{{
    {QuestionStatus::kDraft, "draft"},
    {QuestionStatus::kVerified, "verified"},
    {QuestionStatus::kRejected, "rejected"},
}};
constexpr NameTable<AnswerVariant, 3> kVariantNames{{
    {AnswerVariant::kRaw1, "raw_1"},
    {AnswerVariant::kRaw2, "raw_2"},
    {AnswerVariant::kPerturbed, "perturbed"},
}};
constexpr NameTable<PerturbationKind, 5> kKindNames{{
    {PerturbationKind::kFactualError, "FactualError"},
    {PerturbationKind::kGenderBias, "GenderBias"},
    {PerturbationKind::kFakeReference, "FakeReference"},
    {PerturbationKind::kRichContent, "RichContent"},
    {PerturbationKind::kCompound, "Compound"},
}};
constexpr NameTable<PerturbationKind, 5> kKindShortNames{{
    {PerturbationKind::kFactualError, "FE"},
    {PerturbationKind::kGenderBias, "Gender"},
    {PerturbationKind::kFakeReference, "Ref"},
    {PerturbationKind::kRichContent, "RC"},
    {PerturbationKind::kCompound, "Ref+RC"},
}};
constexpr NameTable<Preference, 3> kPreferenceNames{{
    {Preference::kA1, "A1"},
    {Preference::kTie, "Tie"},
    {Preference::kA2, "A2"},
}};
constexpr NameTable<Choice, 4> kChoiceNames{{
    {Choice::kFirst, "First"},
    {Choice::kSecond, "Second"},
    {Choice::kTie, "Tie"},
    {Choice::kNotFamiliar, "NotFamiliar"},
}};
constexpr NameTable<CotMode, 3> kCotNames{{
    {CotMode::kNone, "none"},
    {CotMode::kCotFirst, "cot_first"},
    {CotMode::kAnswerFirst, "answer_first"},
}};
constexpr NameTable<Group, 2> kGroupNames{{
    {Group::kControl, "control"},
    {Group::kExperimental, "experimental"},
}};
constexpr NameTable<Order, 2> kOrderNames{{
    {Order::kA1First, "A1First"},
    {Order::kA2First, "A2First"},
}};
constexpr NameTable<JudgeKind, 3> kJudgeKindNames{{
    {JudgeKind::kScripted, "scripted"},
    {JudgeKind::kRemote, "remote"},
    {JudgeKind::kHuman, "human"},
}};
constexpr NameTable<VoteStatus, 3> kVoteStatusNames{{
    {VoteStatus::kOk, "ok"},
    {VoteStatus::kInvalid, "invalid"},
    {VoteStatus::kFailed, "failed"},
}};
constexpr NameTable<ReviewVerdict, 3> kVerdictNames{{
    {ReviewVerdict::kKeep, "keep"},
    {ReviewVerdict::kReclassify, "reclassify"},
    {ReviewVerdict::kReject, "reject"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E v) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> lookup(const NameTable<E, N>& table, std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
E parse_or_throw(const NameTable<E, N>& table, std::string_view s,
                 std::string_view what) {
  if (auto v = lookup(table, s)) return *v;
  throw ValidationError("unknown " + std::string(what) + " '" +
                        std::string(s) + "'");
}

}  // namespace

std::string_view to_string(BloomLevel v) { return name_of(kBloomNames, v); }
std::string_view to_string(QuestionStatus v) { return name_of(kStatusNames, v); }
std::string_view to_string(AnswerVariant v) { return name_of(kVariantNames, v); }
std::string_view to_string(PerturbationKind v) { return name_of(kKindNames, v); }
std::string_view to_string(Preference v) { return name_of(kPreferenceNames, v); }
std::string_view to_string(Choice v) { return name_of(kChoiceNames, v); }
std::string_view to_string(CotMode v) { return name_of(kCotNames, v); }
std::string_view to_string(Group v) { return name_of(kGroupNames, v); }
std::string_view to_string(Order v) { return name_of(kOrderNames, v); }
std::string_view to_string(JudgeKind v) { return name_of(kJudgeKindNames, v); }
std::string_view to_string(VoteStatus v) { return name_of(kVoteStatusNames, v); }
std::string_view to_string(ReviewVerdict v) { return name_of(kVerdictNames, v); }
std::string_view short_name(PerturbationKind v) {
  return name_of(kKindShortNames, v);
}

BloomLevel parse_bloom_level(std::string_view s) {
  return parse_or_throw(kBloomNames, s, "bloom level");
}
QuestionStatus parse_question_status(std::string_view s) {
  return parse_or_throw(kStatusNames, s, "question status");
}
AnswerVariant parse_answer_variant(std::string_view s) {
  return parse_or_throw(kVariantNames, s, "answer variant");
}
PerturbationKind parse_perturbation_kind(std::string_view s) {
  if (auto v = lookup(kKindShortNames, s)) return *v;
  return parse_or_throw(kKindNames, s, "perturbation kind");
}
Preference parse_preference(std::string_view s) {
  return parse_or_throw(kPreferenceNames, s, "preference");
}
Choice parse_choice(std::string_view s) {
  return parse_or_throw(kChoiceNames, s, "choice");
}
CotMode parse_cot_mode(std::string_view s) {
  return parse_or_throw(kCotNames, s, "cot mode");
}
Group parse_group(std::string_view s) {
  return parse_or_throw(kGroupNames, s, "group");
}
Order parse_order(std::string_view s) {
  return parse_or_throw(kOrderNames, s, "order");
}
JudgeKind parse_judge_kind(std::string_view s) {
  return parse_or_throw(kJudgeKindNames, s, "judge kind");
}
VoteStatus parse_vote_status(std::string_view s) {
  return parse_or_throw(kVoteStatusNames, s, "vote status");
}
ReviewVerdict parse_review_verdict(std::string_view s) {
  return parse_or_throw(kVerdictNames, s, "review verdict");
}

std::string question_id_for(std::string_view text) {
  return "q-" + content_id({"question", text});
}

std::string answer_id_for(std::string_view question_id, AnswerVariant variant,
                          std::optional<PerturbationKind> perturbation,
                          std::string_view generator, std::string_view text) {
  return "a-" + content_id({"answer", question_id, to_string(variant),
                            perturbation ? to_string(*perturbation) : "",
                            generator, text});
}

std::string sample_id_for(std::string_view question_id, PerturbationKind kind) {
  return "s-" + content_id({"sample", question_id, to_string(kind)});
}

Question make_question(std::string text, BloomLevel level) {
  Question q;
  q.id = question_id_for(text);
  q.text = std::move(text);
  q.level = level;
  return q;
}

Answer make_raw_answer(const Question& q, AnswerVariant variant,
                       std::string generator, std::string text,
                       int generation_index) {
  if (variant == AnswerVariant::kPerturbed) {
    throw ValidationError("make_raw_answer called with perturbed variant");
  }
  Answer a;
  a.id = answer_id_for(q.id, variant, std::nullopt, generator, text);
  a.question_id = q.id;
  a.text = std::move(text);
  a.generator = std::move(generator);
  a.variant = variant;
  a.generation_index = generation_index;
  return a;
}

Answer make_perturbed_answer(const Answer& parent, PerturbationKind kind,
                             std::vector<PerturbationKind> stages,
                             std::string generator, std::string text) {
  Answer a;
  a.id = answer_id_for(parent.question_id, AnswerVariant::kPerturbed, kind,
                       generator, text);
  a.question_id = parent.question_id;
  a.text = std::move(text);
  a.generator = std::move(generator);
  a.variant = AnswerVariant::kPerturbed;
  a.perturbation = kind;
  a.parent_answer_id = parent.id;
  a.stages = std::move(stages);
  a.generation_index = parent.generation_index;
  return a;
}

std::vector<Violation> validate_sample(const Sample& s) {
  std::vector<Violation> out;
  auto fail = [&](std::string invariant, std::string detail) {
    out.push_back({std::move(invariant), std::move(detail)});
  };

  if (s.question.text.empty()) fail("question text empty", s.question.id);
  if (s.question.status != QuestionStatus::kVerified) {
    fail("question not verified", std::string(to_string(s.question.status)));
  } else if (!s.question.review) {
    fail("verified question lacks review record", s.question.id);
  }
  if (s.id != sample_id_for(s.question.id, s.kind)) {
    fail("sample id mismatch", s.id);
  }

  for (const Answer* a : {&s.a1, &s.a2, &s.a2p}) {
    if (a->question_id != s.question.id) {
      fail("answer question mismatch", a->id);
    }
  }
  if (s.a1.variant != AnswerVariant::kRaw1) {
    fail("a1 must be raw_1", std::string(to_string(s.a1.variant)));
  }
  if (s.a2.variant != AnswerVariant::kRaw2) {
    fail("a2 must be raw_2", std::string(to_string(s.a2.variant)));
  }
  for (const Answer* a : {&s.a1, &s.a2}) {
    if (a->perturbation || a->parent_answer_id || !a->stages.empty()) {
      fail("raw answer carries perturbation", a->id);
    }
  }
  if (s.a2p.variant != AnswerVariant::kPerturbed) {
    fail("a2p must be perturbed", std::string(to_string(s.a2p.variant)));
  }
  if (!s.a2p.parent_answer_id || *s.a2p.parent_answer_id != s.a2.id) {
    fail("perturbed parent mismatch",
         s.a2p.parent_answer_id.value_or("<none>") + " != " + s.a2.id);
  }
  if (s.a2p.perturbation != s.kind) {
    fail("perturbation kind mismatch", std::string(to_string(s.kind)));
  }
  if (s.kind == PerturbationKind::kCompound) {
    const std::vector<PerturbationKind> expected = {
        PerturbationKind::kFakeReference, PerturbationKind::kRichContent};
    if (s.a2p.stages != expected) {
      fail("compound requires two-stage provenance",
           std::to_string(s.a2p.stages.size()) + " stage(s) recorded");
    }
  } else if (s.a2p.stages != std::vector<PerturbationKind>{s.kind}) {
    fail("stage provenance mismatch", std::string(to_string(s.kind)));
  }
  if (s.target_flip != s.a2.generation_index) {
    fail("target flip mismatch", std::to_string(s.target_flip));
  }
  if (s.a1.generation_index == s.a2.generation_index) {
    fail("raw answers share a generation index", s.a1.id);
  }
  return out;
}

}  // namespace judgeprobe

namespace judgeprobe {

std::string task_id_for(std::string_view sample_id, Group group, Order order,
                        int round) {
  return "t-" + content_id({"task", sample_id, to_string(group),
                            to_string(order), std::to_string(round)});
}

}  // namespace judgeprobe

namespace judgeprobe {

SampleIndex::SampleIndex(std::span<const Sample> samples) {
  by_id_.reserve(samples.size());
  for (const auto& s : samples) by_id_.emplace(s.id, &s);
}

const Sample& SampleIndex::at(const std::string& sample_id) const {
  auto it = by_id_.find(sample_id);
  if (it == by_id_.end()) throw NotFoundError("unknown sample " + sample_id);
  return *it->second;
}

}  // namespace judgeprobe
