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

// Bias metrics computed from aggregated preferences and raw votes: attack
// success rate in its two forms, positional and verbosity bias, turnover of
// small vote budgets against the converged result, ranking tables and the
// chain-of-thought comparison.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "judgeprobe/aggregation.hpp"
#include "judgeprobe/model.hpp"
#include "judgeprobe/table.hpp"

namespace judgeprobe {

// ---------------------------------------------------------------------------
// Attack success rate

enum class AsrFormula {
  // Base: ctrl in {A1, Tie}; shifted: exp == A2. Used for Ref, RC, Ref+RC.
  kSemanticAgnostic,
  // Base: ctrl in {A2, Tie}; shifted: exp in {A2, Tie}. Used for FE, Gender.
  kSemanticRelated,
};

AsrFormula asr_formula_for(PerturbationKind kind);

struct AsrTraceEntry {
  std::string sample_id;
  Preference pref_ctrl = Preference::kTie;
  Preference pref_exp = Preference::kTie;
  bool in_base = false;
  bool shifted = false;
};

struct AsrReport {
  PerturbationKind kind = PerturbationKind::kFakeReference;
  AsrFormula formula = AsrFormula::kSemanticAgnostic;
  std::size_t base = 0;
  std::size_t shifted = 0;
  std::vector<AsrTraceEntry> trace;
  // Outcomes lacking a group preference (unevaluable samples).
  std::vector<std::string> excluded;

  // nullopt when the base set is empty.
  std::optional<double> asr() const;
  // "n/a" when undefined.
  std::string asr_text(int precision) const;
};

void to_json(Json& j, const AsrReport& v);

// Outcomes must all carry `kind`, which must be Ref, RC or Compound.
AsrReport asr_agnostic(std::span<const SampleOutcome> outcomes,
                       PerturbationKind kind);
// Outcomes must all carry `kind`, which must be FE or Gender.
AsrReport asr_semantic(std::span<const SampleOutcome> outcomes,
                       PerturbationKind kind);
// Either formula, without the kind restriction; used by attack columns.
AsrReport asr_with_formula(std::span<const SampleOutcome> outcomes,
                           PerturbationKind kind, AsrFormula formula);
// Picks the formula for the kind and keeps only outcomes of that kind.
AsrReport asr_for_kind(std::span<const SampleOutcome> outcomes,
                       PerturbationKind kind);

// Exact sample-level preference distribution of a judge voting uniformly over
// {First, Second, Tie} on `votes` presentations, by enumerating all 3^votes
// outcomes.
struct PreferenceCounts {
  std::uint64_t a1 = 0;
  std::uint64_t tie = 0;
  std::uint64_t a2 = 0;
  std::uint64_t total() const { return a1 + tie + a2; }
};

PreferenceCounts enumerate_uniform_preferences(int votes);

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};

// Expected ASR of a uniform-random judge with independent groups: P(A2) for the
// agnostic formula, P(A2 or Tie) for the semantic one. Not reduced.
Fraction random_judge_asr_exact(int votes_per_sample, AsrFormula formula);

// ---------------------------------------------------------------------------
// Positional bias

enum class Severity { kGreen, kYellow, kRed };
std::string_view to_string(Severity s);
// |diff| < 0.10 green, 0.10..0.30 yellow, > 0.30 red.
Severity severity_for(double diff);

struct PositionalRow {
  std::string judge_id;
  std::uint64_t first = 0;
  std::uint64_t tie = 0;
  std::uint64_t second = 0;
  std::uint64_t not_familiar = 0;

  std::uint64_t valid() const { return first + tie + second; }
  double first_fraction() const;
  double tie_fraction() const;
  double second_fraction() const;
  double diff() const { return first_fraction() - second_fraction(); }
  Severity severity() const { return severity_for(diff()); }
};

struct PositionalReport {
  std::vector<PositionalRow> rows;
  Table render(int precision = 3) const;
};

// One row per judge, in order of first appearance. Only ok votes count;
// NotFamiliar votes are tallied in their own column.
PositionalReport positional_report(std::span<const Vote> votes);

// ---------------------------------------------------------------------------
// Verbosity bias

using LengthFunction = std::function<std::size_t(std::string_view)>;

struct LengthVote {
  Choice choice = Choice::kTie;
  std::size_t first_len = 0;
  std::size_t second_len = 0;
};

struct VerbosityBin {
  std::size_t lo = 0;
  std::optional<std::size_t> hi;  // exclusive; nullopt for the open last bin
  std::int64_t half_sum = 0;
  std::int64_t count = 0;
  std::optional<double> mean() const;
};

struct VerbosityCurve {
  std::string judge_id;
  std::vector<VerbosityBin> bins;
  std::size_t equal_length_excluded = 0;
  Table render(int precision = 3) const;
};

inline const std::vector<std::size_t> kDefaultVerbosityEdges = {0, 10, 20, 30, 40};

// 0 for the shorter answer, 0.5 for a tie, 1 for the longer answer.
// Equal-length pairs contribute to no bin.
VerbosityCurve verbosity_curve(std::span<const LengthVote> votes,
                               std::span<const std::size_t> bin_edges);

// Control-group votes of one judge, with presented lengths.
std::vector<LengthVote> control_length_votes(std::span<const ComparisonTask> tasks,
                                             std::span<const Vote> valid_votes,
                                             const SampleIndex& samples,
                                             const std::string& judge_id,
                                             const LengthFunction& length);

// ---------------------------------------------------------------------------
// Turnover

// Slot scores (half-units) of one (sample, group), per order, by round.
struct VoteStream {
  std::string sample_id;
  Group group = Group::kControl;
  std::vector<int> a1_first;
  std::vector<int> a2_first;
};

struct TurnoverPoint {
  int k = 0;
  std::size_t flipped = 0;
  std::size_t total = 0;
  double proportion() const {
    return total == 0 ? 0.0 : static_cast<double>(flipped) / static_cast<double>(total);
  }
};

struct TurnoverReport {
  int k_max = 0;
  std::vector<TurnoverPoint> points;
  std::vector<std::string> excluded;
  Table render(int precision = 3) const;
};

// Budget-k preference uses the first k votes of each order; the converged
// preference uses all k_max. Streams without k_max votes in both orders are
// excluded.
TurnoverReport turnover(std::span<const VoteStream> streams, int k_max,
                        std::span<const int> budgets);

std::vector<VoteStream> vote_streams(std::span<const ComparisonTask> tasks,
                                     std::span<const Vote> valid_votes,
                                     const std::string& judge_id,
                                     std::optional<Group> group = std::nullopt);

// ---------------------------------------------------------------------------
// Ranking tables

enum class Better { kLower, kHigher };

// Competition ranking: ties share the smallest rank and the next rank skips.
std::vector<int> competition_ranks(std::span<const double> values, Better better);

struct RankingRow {
  std::string label;
  std::vector<double> values;
  std::vector<int> ranks;
  double average = 0.0;
};

struct RankingTable {
  std::vector<std::string> columns;
  std::vector<RankingRow> rows;  // ascending by average, stable
  Table render(int precision = 2) const;
};

RankingTable ranking_table(const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& column_labels,
                           const std::vector<std::vector<std::optional<double>>>& matrix,
                           Better better = Better::kLower);

// Reads "label,col1,col2,..." CSV with a header row into a ranking table.
RankingTable ranking_table_from_csv(std::string_view csv);

// ---------------------------------------------------------------------------
// Chain-of-thought comparison

struct CotRun {
  CotMode mode = CotMode::kNone;
  std::string dataset_hash;
  std::vector<SampleOutcome> outcomes;
};

struct CotRow {
  PerturbationKind kind = PerturbationKind::kFactualError;
  std::string metric;  // "Acc" or "ASR"
  std::vector<std::optional<double>> values;
  std::vector<std::optional<int>> ranks;
};

struct CotTable {
  std::vector<CotMode> modes;
  std::vector<CotRow> rows;
  Table render(int precision = 3) const;
};

// Acc is the fraction of evaluable experimental FE samples whose preference is
// A1. Ranks run within a row: higher Acc is better, lower ASR is better.
CotTable cot_comparison(std::span<const CotRun> runs);

}  // namespace judgeprobe
