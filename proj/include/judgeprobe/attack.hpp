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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "judgeprobe/aggregation.hpp"
#include "judgeprobe/codec.hpp"
#include "judgeprobe/datagen.hpp"
#include "judgeprobe/judge.hpp"
#include "judgeprobe/metrics.hpp"
#include "judgeprobe/model.hpp"
#include "judgeprobe/table.hpp"

namespace judgeprobe {

enum class ResearchQuestion { kRQ1, kRQ2 };
std::string_view to_string(ResearchQuestion v);
ResearchQuestion parse_research_question(std::string_view s);

struct WeaknessRecipe {
  enum class Type { kInjectedFlaw, kWeakerGenerator };
  Type type = Type::kInjectedFlaw;
  std::optional<PerturbationKind> flaw;  // kInjectedFlaw
  std::string generator;                 // kWeakerGenerator

  static WeaknessRecipe injected_flaw(PerturbationKind kind);
  static WeaknessRecipe weaker_generator(std::string generator);
  bool operator==(const WeaknessRecipe&) const = default;
};

struct WeakSet {
  std::string label;
  WeaknessRecipe recipe;
  std::vector<Answer> answers;  // one per question, same order as questions
  bool operator==(const WeakSet&) const = default;
};

// One ASR column: a weak set dressed with one deception kind.
struct AttackColumn {
  std::string label;
  std::size_t weak_set = 0;
  PerturbationKind deception = PerturbationKind::kFakeReference;
  bool operator==(const AttackColumn&) const = default;
};

struct AttackExperiment {
  ResearchQuestion rq = ResearchQuestion::kRQ1;
  std::vector<Question> questions;
  std::string anchor_generator;
  std::vector<Answer> anchors;  // A1, one per question
  std::vector<WeakSet> weak_sets;
  std::vector<Answer> perturbed;  // every A2^p; parent is a weak-set answer
  std::vector<AttackColumn> columns;
  bool random_baseline = true;

  bool operator==(const AttackExperiment&) const = default;
};

void to_json(Json& j, const WeaknessRecipe& v);
void from_json(const Json& j, WeaknessRecipe& v);
void to_json(Json& j, const WeakSet& v);
void from_json(const Json& j, WeakSet& v);
void to_json(Json& j, const AttackColumn& v);
void from_json(const Json& j, AttackColumn& v);
void to_json(Json& j, const AttackExperiment& v);
void from_json(const Json& j, AttackExperiment& v);

// Structural checks: every set indexes the question subset, every A2^p parent
// lies in a weak set. Throws ValidationError.
void validate_experiment(const AttackExperiment& e);

// Anchor answers and pre-flaw answers both come from `anchor`; `perturber`
// applies the flaw and the deception kinds.
AttackExperiment build_rq1(std::span<const Question> questions, const GenerationContext& anchor,
                           const GenerationContext& perturber, PerturbationKind flaw,
                           std::span<const PerturbationKind> deceptions);

// One weak set per weak generator plus the anchor generator reused as a weak
// generator, each dressed with `deception`.
AttackExperiment build_rq2(std::span<const Question> questions, const GenerationContext& anchor,
                           std::span<const GenerationContext> weak,
                           const GenerationContext& perturber,
                           PerturbationKind deception = PerturbationKind::kFakeReference);

// Control comparisons (A1 vs A2) are scheduled once per weak set;
// experimental comparisons (A1 vs A2^p) once per column.
struct AttackPlan {
  std::vector<Sample> samples;
  std::vector<ComparisonTask> tasks;
  // control_sample[w][q], column_sample[c][q]: sample ids.
  std::vector<std::vector<std::string>> control_sample;
  std::vector<std::vector<std::string>> column_sample;
};

AttackPlan plan_attack(const AttackExperiment& e, int votes_per_order, std::uint64_t seed);

struct VoteShare {
  std::uint64_t anchor = 0;
  std::uint64_t tie = 0;
  std::uint64_t weak = 0;
  std::uint64_t total() const { return anchor + tie + weak; }
};

struct AttackJudgeResult {
  std::string judge_id;
  std::vector<AsrReport> columns;
  std::vector<VoteShare> weak_share;  // control-group votes, per weak set
  std::vector<Unevaluable> unevaluable;
};

struct AttackResult {
  std::vector<std::string> column_labels;
  std::vector<std::string> weak_labels;
  std::vector<AttackJudgeResult> judges;
  std::vector<Vote> votes;

  // Judges × columns with bracketed ranks; nullopt when some ASR is undefined.
  std::optional<RankingTable> ranking() const;
  Table asr_table(int precision = 2) const;
  Table weak_share_table(int precision = 3) const;
};

AttackResult run_attack(const AttackExperiment& e, std::span<const JudgeSpec> judges,
                        int votes_per_order, std::uint64_t seed,
                        const JudgeRunOptions& options = {});

}  // namespace judgeprobe
