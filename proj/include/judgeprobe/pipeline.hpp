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

#include <span>
#include <string>
#include <vector>

#include "judgeprobe/aggregation.hpp"
#include "judgeprobe/metrics.hpp"
#include "judgeprobe/store.hpp"
#include "judgeprobe/table.hpp"

namespace judgeprobe {

// Glue between a loaded run and the metric functions; shared by the CLI and
// the stored-report reproducibility check.

// Filter recorded by the last `aggregate`, else the manifest's.
FilterPolicy effective_filter(const RunData& run);

// Judges in manifest order.
std::vector<std::string> judge_ids(const RunData& run);

std::vector<Vote> judge_votes(const RunData& run, const std::string& judge_id);

AggregateResult aggregate_run(const RunData& run, const std::string& judge_id,
                              const FilterPolicy& filter);

std::vector<SampleOutcome> run_outcomes(const RunData& run, const std::string& judge_id,
                                        const FilterPolicy& filter);

// One report per perturbation kind present in the dataset.
std::vector<AsrReport> asr_reports(std::span<const SampleOutcome> outcomes);

std::vector<Json> aggregate_records(const RunData& run, const FilterPolicy& filter);
std::vector<Json> report_records(const RunData& run, const FilterPolicy& filter);

// Judges × kinds; cells are ASR with base/shifted counts.
Table asr_table(const RunData& run, std::span<const std::string> judges,
                const FilterPolicy& filter, int precision = 3);

// Judges × kinds ASR matrix for ranking; ValidationError if any cell is
// undefined.
RankingTable run_ranking(const RunData& run, std::span<const std::string> judges,
                         const FilterPolicy& filter);

}  // namespace judgeprobe
