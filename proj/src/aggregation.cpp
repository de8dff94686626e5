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

#include "judgeprobe/aggregation.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "judgeprobe/errors.hpp"

namespace judgeprobe {

void to_json(Json& j, const FilterPolicy& v) {
  j = Json{{"min_elapsed_ms", v.min_elapsed_ms},
           {"drop_not_familiar", v.drop_not_familiar},
           {"drop_invalid", v.drop_invalid}};
}

void from_json(const Json& j, FilterPolicy& v) {
  FilterPolicy d;
  v.min_elapsed_ms = j.value("min_elapsed_ms", d.min_elapsed_ms);
  v.drop_not_familiar = j.value("drop_not_familiar", d.drop_not_familiar);
  v.drop_invalid = j.value("drop_invalid", d.drop_invalid);
  if (v.min_elapsed_ms < 0) throw ValidationError("min_elapsed_ms must be >= 0");
}

std::vector<Vote> filter_votes(std::span<const Vote> votes,
                               const FilterPolicy& policy) {
  std::vector<Vote> out;
  out.reserve(votes.size());
  for (const auto& v : votes) {
    if (policy.drop_invalid && v.status != VoteStatus::kOk) continue;
    if (policy.drop_not_familiar && v.choice == Choice::kNotFamiliar) continue;
    if (v.source == JudgeKind::kHuman && v.elapsed_ms < policy.min_elapsed_ms) {
      continue;
    }
    out.push_back(v);
  }
  return out;
}

int slot_score_halves(Choice choice, Order order) {
  switch (choice) {
    case Choice::kTie:
      return 1;
    case Choice::kFirst:
      return order == Order::kA1First ? 0 : 2;
    case Choice::kSecond:
      return order == Order::kA1First ? 2 : 0;
    case Choice::kNotFamiliar:
      break;
  }
  throw ValidationError("NotFamiliar votes have no slot score; filter them first");
}

void to_json(Json& j, const SampleScore& v) {
  j = Json{{"sample_id", v.sample_id},
           {"group", to_string(v.group)},
           {"half_sum", v.half_sum},
           {"vote_count", v.vote_count},
           {"preference", to_string(v.preference)}};
}

void from_json(const Json& j, SampleScore& v) {
  v.sample_id = j.at("sample_id").get<std::string>();
  v.group = parse_group(j.at("group").get<std::string>());
  v.half_sum = j.at("half_sum").get<std::int64_t>();
  v.vote_count = j.at("vote_count").get<std::int64_t>();
  v.preference = parse_preference(j.at("preference").get<std::string>());
}

Preference preference_from_halves(std::int64_t half_sum, std::int64_t count) {
  // mean = half_sum / (2 * count); mean vs 1/2  <=>  half_sum vs count.
  if (half_sum < count) return Preference::kA1;
  if (half_sum > count) return Preference::kA2;
  return Preference::kTie;
}

std::optional<SampleScore> aggregate_sample(const std::string& sample_id,
                                            Group group,
                                            std::span<const OrderedChoice> votes) {
  if (votes.empty()) return std::nullopt;
  SampleScore s;
  s.sample_id = sample_id;
  s.group = group;
  for (const auto& v : votes) s.half_sum += slot_score_halves(v.choice, v.order);
  s.vote_count = static_cast<std::int64_t>(votes.size());
  s.preference = preference_from_halves(s.half_sum, s.vote_count);
  return s;
}

AggregateResult aggregate_votes(std::span<const ComparisonTask> tasks,
                                std::span<const Vote> valid_votes,
                                const std::string& judge_id) {
  std::unordered_map<std::string, const ComparisonTask*> task_by_id;
  task_by_id.reserve(tasks.size());
  using Key = std::pair<std::string, Group>;
  std::map<Key, std::vector<OrderedChoice>> buckets;
  for (const auto& t : tasks) {
    task_by_id.emplace(t.id, &t);
    buckets.try_emplace({t.sample_id, t.group});
  }

  // Canonical order by task id so results never depend on storage order.
  std::vector<const Vote*> ordered;
  for (const auto& v : valid_votes) {
    if (v.judge_id == judge_id) ordered.push_back(&v);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Vote* a, const Vote* b) { return a->task_id < b->task_id; });

  for (const Vote* v : ordered) {
    auto it = task_by_id.find(v->task_id);
    if (it == task_by_id.end()) {
      throw IntegrityError("vote references unknown task " + v->task_id);
    }
    if (v->status != VoteStatus::kOk || !v->choice) {
      throw ValidationError("vote for " + v->task_id +
                            " has no valid choice; filter invalid votes first");
    }
    const auto& t = *it->second;
    buckets[{t.sample_id, t.group}].push_back({*v->choice, t.order});
  }

  AggregateResult result;
  result.judge_id = judge_id;
  for (const auto& [key, votes] : buckets) {
    if (auto s = aggregate_sample(key.first, key.second, votes)) {
      result.scores.push_back(std::move(*s));
    } else {
      result.unevaluable.push_back({key.first, key.second});
    }
  }
  return result;
}

std::vector<SampleOutcome> sample_outcomes(std::span<const Sample> samples,
                                           const AggregateResult& aggregate) {
  std::map<std::pair<std::string, Group>, Preference> prefs;
  for (const auto& s : aggregate.scores) {
    prefs.emplace(std::make_pair(s.sample_id, s.group), s.preference);
  }
  std::vector<SampleOutcome> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    SampleOutcome o;
    o.sample_id = s.id;
    o.kind = s.kind;
    if (auto it = prefs.find({s.id, Group::kControl}); it != prefs.end()) {
      o.pref_ctrl = it->second;
    }
    if (auto it = prefs.find({s.id, Group::kExperimental}); it != prefs.end()) {
      o.pref_exp = it->second;
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace judgeprobe
