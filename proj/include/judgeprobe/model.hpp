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

// Domain values shared by every stage of the pipeline. All types are plain
// immutable-by-convention values; nothing here owns a resource.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace judgeprobe {

// Revised Bloom's taxonomy, lower-order to higher-order.
enum class BloomLevel {
  kRemembering,
  kUnderstanding,
  kApplying,
  kAnalyzing,
  kEvaluating,
  kCreating,
};

inline constexpr std::array<BloomLevel, 6> kAllBloomLevels = {
    BloomLevel::kRemembering, BloomLevel::kUnderstanding,
    BloomLevel::kApplying,    BloomLevel::kAnalyzing,
    BloomLevel::kEvaluating,  BloomLevel::kCreating,
};

enum class QuestionStatus { kDraft, kVerified, kRejected };

enum class AnswerVariant { kRaw1, kRaw2, kPerturbed };

// FactualError and GenderBias change meaning; the rest only change dressing.
// Compound is FakeReference followed by RichContent.
enum class PerturbationKind {
  kFactualError,
  kGenderBias,
  kFakeReference,
  kRichContent,
  kCompound,
};

inline constexpr std::array<PerturbationKind, 5> kAllPerturbationKinds = {
    PerturbationKind::kFactualError, PerturbationKind::kGenderBias,
    PerturbationKind::kFakeReference, PerturbationKind::kRichContent,
    PerturbationKind::kCompound,
};

constexpr bool is_semantic_related(PerturbationKind k) {
  return k == PerturbationKind::kFactualError ||
         k == PerturbationKind::kGenderBias;
}

// Sample-level outcome. kA2 is the slot of A2 (control) or A2^p (experimental).
enum class Preference { kA1, kTie, kA2 };

// What a judge picked for one presentation. kNotFamiliar is human-only.
enum class Choice { kFirst, kSecond, kTie, kNotFamiliar };

enum class CotMode { kNone, kCotFirst, kAnswerFirst };

enum class Group { kControl, kExperimental };

enum class Order { kA1First, kA2First };

enum class JudgeKind { kScripted, kRemote, kHuman };

enum class VoteStatus { kOk, kInvalid, kFailed };

std::string_view to_string(BloomLevel v);
std::string_view to_string(QuestionStatus v);
std::string_view to_string(AnswerVariant v);
std::string_view to_string(PerturbationKind v);
std::string_view to_string(Preference v);
std::string_view to_string(Choice v);
std::string_view to_string(CotMode v);
std::string_view to_string(Group v);
std::string_view to_string(Order v);
std::string_view to_string(JudgeKind v);
std::string_view to_string(VoteStatus v);

// Column tag used in report tables (FE, Gender, Ref, RC, Ref+RC).
std::string_view short_name(PerturbationKind v);

// Parsers accept the canonical name; perturbation kinds also accept the short
// tag. All throw ValidationError on unknown input.
BloomLevel parse_bloom_level(std::string_view s);
QuestionStatus parse_question_status(std::string_view s);
AnswerVariant parse_answer_variant(std::string_view s);
PerturbationKind parse_perturbation_kind(std::string_view s);
Preference parse_preference(std::string_view s);
Choice parse_choice(std::string_view s);
CotMode parse_cot_mode(std::string_view s);
Group parse_group(std::string_view s);
Order parse_order(std::string_view s);
JudgeKind parse_judge_kind(std::string_view s);
VoteStatus parse_vote_status(std::string_view s);

enum class ReviewVerdict { kKeep, kReclassify, kReject };
std::string_view to_string(ReviewVerdict v);
ReviewVerdict parse_review_verdict(std::string_view s);

struct ReviewDecision {
  std::string question_id;
  ReviewVerdict verdict = ReviewVerdict::kKeep;
  std::optional<BloomLevel> level;  // set iff verdict == kReclassify
  std::string note;

  bool operator==(const ReviewDecision&) const = default;
};

struct Question {
  std::string id;
  std::string text;
  BloomLevel level = BloomLevel::kRemembering;
  QuestionStatus status = QuestionStatus::kDraft;
  std::optional<ReviewDecision> review;

  bool operator==(const Question&) const = default;
};

struct Answer {
  std::string id;
  std::string question_id;
  std::string text;
  std::string generator;
  AnswerVariant variant = AnswerVariant::kRaw1;
  std::optional<PerturbationKind> perturbation;
  std::optional<std::string> parent_answer_id;
  // Single-kind perturbations applied, in order. A compound answer records
  // both passes.
  std::vector<PerturbationKind> stages;
  // Which of the two independently generated raw answers this is (0 or 1).
  // Perturbed answers inherit their parent's index.
  int generation_index = 0;
  // Semantic-preservation check failed; needs a human look.
  bool flagged_for_review = false;

  bool operator==(const Answer&) const = default;
};

struct Sample {
  std::string id;
  Question question;
  Answer a1;
  Answer a2;
  Answer a2p;
  PerturbationKind kind = PerturbationKind::kFakeReference;
  // Generation index of the raw answer picked as the perturbation target.
  int target_flip = 0;
  std::optional<Preference> pref_ctrl;
  std::optional<Preference> pref_exp;

  bool operator==(const Sample&) const = default;
};

// Content-addressed identifiers: hex prefix of SHA-256 over role + fields.
std::string question_id_for(std::string_view text);
std::string answer_id_for(std::string_view question_id, AnswerVariant variant,
                          std::optional<PerturbationKind> perturbation,
                          std::string_view generator, std::string_view text);
std::string sample_id_for(std::string_view question_id, PerturbationKind kind);

Question make_question(std::string text, BloomLevel level);
Answer make_raw_answer(const Question& q, AnswerVariant variant,
                       std::string generator, std::string text,
                       int generation_index);
Answer make_perturbed_answer(const Answer& parent, PerturbationKind kind,
                             std::vector<PerturbationKind> stages,
                             std::string generator, std::string text);

// Names one failed invariant.
struct Violation {
  std::string invariant;
  std::string detail;
};

std::vector<Violation> validate_sample(const Sample& sample);

}  // namespace judgeprobe

namespace judgeprobe {

// One scheduled presentation of a (sample, group) pair in a fixed order.
struct ComparisonTask {
  std::string id;
  std::string sample_id;
  Group group = Group::kControl;
  Order order = Order::kA1First;
  int round = 1;

  bool operator==(const ComparisonTask&) const = default;
};

std::string task_id_for(std::string_view sample_id, Group group, Order order,
                        int round);

struct Vote {
  std::string task_id;
  std::string judge_id;
  JudgeKind source = JudgeKind::kScripted;
  VoteStatus status = VoteStatus::kOk;
  std::optional<Choice> choice;  // present iff status == kOk
  std::int64_t elapsed_ms = 0;
  std::optional<std::int64_t> client_elapsed_ms;
  std::optional<std::string> raw_response;
  CotMode cot_mode = CotMode::kNone;
  std::int64_t timestamp_ms = 0;
  int attempts = 1;
  // Self-reported identifier of the human who cast the vote.
  std::optional<std::string> annotator;

  bool operator==(const Vote&) const = default;
};

}  // namespace judgeprobe

#include <span>
#include <unordered_map>

namespace judgeprobe {

// Non-owning id -> Sample lookup over a sample list that outlives it.
class SampleIndex {
 public:
  SampleIndex() = default;
  explicit SampleIndex(std::span<const Sample> samples);
  const Sample& at(const std::string& sample_id) const;
  bool contains(const std::string& sample_id) const {
    return by_id_.count(sample_id) != 0;
  }
  std::size_t size() const { return by_id_.size(); }

 private:
  std::unordered_map<std::string, const Sample*> by_id_;
};

}  // namespace judgeprobe
