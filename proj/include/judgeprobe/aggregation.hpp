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

// Vote filtering and the sample-level aggregate: every valid vote scores 0, 0.5
// or 1 toward the A2 slot, the mean decides the preference with 0.5 as the
// threshold. Scores are kept in half-units so the tie test is exact.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "judgeprobe/codec.hpp"
#include "judgeprobe/model.hpp"

namespace judgeprobe {

struct FilterPolicy {
  std::int64_t min_elapsed_ms = 5000;  // human votes only
  bool drop_not_familiar = true;
  bool drop_invalid = true;

  bool operator==(const FilterPolicy&) const = default;
};

void to_json(Json& j, const FilterPolicy& v);
void from_json(const Json& j, FilterPolicy& v);

std::vector<Vote> filter_votes(std::span<const Vote> votes,
                               const FilterPolicy& policy);

// Score toward the A2 slot in half-units: 0 (A1), 1 (Tie) or 2 (A2).
// Throws ValidationError for NotFamiliar.
int slot_score_halves(Choice choice, Order order);

inline double slot_score(Choice choice, Order order) {
  return slot_score_halves(choice, order) / 2.0;
}

struct OrderedChoice {
  Choice choice;
  Order order;
};

struct SampleScore {
  std::string sample_id;
  Group group = Group::kControl;
  std::int64_t half_sum = 0;
  std::int64_t vote_count = 0;
  Preference preference = Preference::kTie;

  double mean() const {
    return static_cast<double>(half_sum) / (2.0 * static_cast<double>(vote_count));
  }
  bool operator==(const SampleScore&) const = default;
};

void to_json(Json& j, const SampleScore& v);
void from_json(const Json& j, SampleScore& v);

// A1 below 0.5, Tie at exactly 0.5, A2 above. Computed as half_sum vs count.
Preference preference_from_halves(std::int64_t half_sum, std::int64_t count);

// Returns nullopt when there are no votes (the sample is unevaluable).
std::optional<SampleScore> aggregate_sample(const std::string& sample_id,
                                            Group group,
                                            std::span<const OrderedChoice> votes);

struct Unevaluable {
  std::string sample_id;
  Group group = Group::kControl;
  bool operator==(const Unevaluable&) const = default;
};

struct AggregateResult {
  std::string judge_id;
  std::vector<SampleScore> scores;        // sorted by (sample_id, group)
  std::vector<Unevaluable> unevaluable;   // scheduled pairs with no valid vote
};

// Aggregates the given judge's already-filtered votes over every scheduled
// (sample, group) pair. Votes from other judges are ignored.
AggregateResult aggregate_votes(std::span<const ComparisonTask> tasks,
                                std::span<const Vote> valid_votes,
                                const std::string& judge_id);

// Sample-level view used by the metrics: both group preferences per sample.
struct SampleOutcome {
  std::string sample_id;
  PerturbationKind kind = PerturbationKind::kFakeReference;
  std::optional<Preference> pref_ctrl;
  std::optional<Preference> pref_exp;
};

std::vector<SampleOutcome> sample_outcomes(std::span<const Sample> samples,
                                           const AggregateResult& aggregate);

}  // namespace judgeprobe
