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

#include "judgeprobe/pipeline.hpp"

#include <set>

#include "judgeprobe/errors.hpp"

namespace judgeprobe {

FilterPolicy effective_filter(const RunData& run) {
  for (const auto& r : run.aggregates) {
    if (r.value("type", "") == "filter") return r.at("filter").get<FilterPolicy>();
  }
  return run.manifest.filter;
}

std::vector<std::string> judge_ids(const RunData& run) {
  std::vector<std::string> out;
  for (const auto& j : run.manifest.judges) out.push_back(j.id);
  return out;
}

std::vector<Vote> judge_votes(const RunData& run, const std::string& judge_id) {
  if (run.judge(judge_id) == nullptr) {
    throw NotFoundError("judge " + judge_id + " is not registered in run " +
                        run.manifest.run_id);
  }
  std::vector<Vote> out;
  for (const auto& v : run.votes) {
    if (v.judge_id == judge_id) out.push_back(v);
  }
  return out;
}

AggregateResult aggregate_run(const RunData& run, const std::string& judge_id,
                              const FilterPolicy& filter) {
  const auto votes = judge_votes(run, judge_id);
  const auto valid = filter_votes(votes, filter);
  return aggregate_votes(run.tasks, valid, judge_id);
}

std::vector<SampleOutcome> run_outcomes(const RunData& run, const std::string& judge_id,
                                        const FilterPolicy& filter) {
  return sample_outcomes(run.samples, aggregate_run(run, judge_id, filter));
}

std::vector<AsrReport> asr_reports(std::span<const SampleOutcome> outcomes) {
  std::set<PerturbationKind> present;
  for (const auto& o : outcomes) present.insert(o.kind);
  std::vector<AsrReport> out;
  for (auto kind : kAllPerturbationKinds) {
    if (present.contains(kind)) out.push_back(asr_for_kind(outcomes, kind));
  }
  return out;
}

std::vector<Json> aggregate_records(const RunData& run, const FilterPolicy& filter) {
  std::vector<Json> out;
  out.push_back(Json{{"type", "filter"}, {"filter", filter}});
  for (const auto& judge : judge_ids(run)) {
    const auto agg = aggregate_run(run, judge, filter);
    for (const auto& s : agg.scores) {
      Json j = s;
      j["type"] = "score";
      j["judge_id"] = judge;
      out.push_back(std::move(j));
    }
    for (const auto& u : agg.unevaluable) {
      out.push_back(Json{{"type", "unevaluable"},
                         {"judge_id", judge},
                         {"sample_id", u.sample_id},
                         {"group", to_string(u.group)}});
    }
  }
  return out;
}

std::vector<Json> report_records(const RunData& run, const FilterPolicy& filter) {
  std::vector<Json> out;
  for (const auto& judge : judge_ids(run)) {
    const auto outcomes = run_outcomes(run, judge, filter);
    for (const auto& r : asr_reports(outcomes)) {
      Json j = r;
      j["type"] = "asr";
      j["judge_id"] = judge;
      out.push_back(std::move(j));
    }
    const auto votes = judge_votes(run, judge);
    for (const auto& row : positional_report(votes).rows) {
      Json j{{"type", "positional"},
             {"judge_id", judge},
             {"first", row.first},
             {"tie", row.tie},
             {"second", row.second},
             {"not_familiar", row.not_familiar}};
      if (row.valid() > 0) {
        j["diff"] = row.diff();
        j["severity"] = to_string(row.severity());
      }
      out.push_back(std::move(j));
    }
  }
  return out;
}

Table asr_table(const RunData& run, std::span<const std::string> judges,
                const FilterPolicy& filter, int precision) {
  std::set<PerturbationKind> present;
  for (const auto& s : run.samples) present.insert(s.kind);
  Table t;
  t.header.push_back("Judge");
  for (auto k : kAllPerturbationKinds) {
    if (present.contains(k)) t.header.emplace_back(short_name(k));
  }
  std::size_t excluded = 0;
  for (const auto& judge : judges) {
    std::vector<std::string> row{judge};
    for (const auto& r : asr_reports(run_outcomes(run, judge, filter))) {
      row.push_back(r.asr_text(precision) + " (" + std::to_string(r.shifted) + "/" +
                    std::to_string(r.base) + ")");
      excluded += r.excluded.size();
    }
    t.rows.push_back(std::move(row));
  }
  t.footer = {"Cells: ASR (shifted/base). FE and Gender use the semantic-related formula; "
              "Ref, RC and Ref+RC the semantic-agnostic one.",
              std::to_string(excluded) + " sample outcome(s) excluded for missing preferences."};
  return t;
}

RankingTable run_ranking(const RunData& run, std::span<const std::string> judges,
                         const FilterPolicy& filter) {
  std::vector<std::string> rows(judges.begin(), judges.end());
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> matrix;
  for (const auto& judge : judges) {
    auto& row = matrix.emplace_back();
    const auto reports = asr_reports(run_outcomes(run, judge, filter));
    if (columns.empty()) {
      for (const auto& r : reports) columns.emplace_back(short_name(r.kind));
    }
    for (const auto& r : reports) row.push_back(r.asr());
  }
  return ranking_table(rows, columns, matrix, Better::kLower);
}

}  // namespace judgeprobe
