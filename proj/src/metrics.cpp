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

#include "judgeprobe/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/text.hpp"

namespace judgeprobe {

// ---------------------------------------------------------------------------
// Attack success rate

AsrFormula asr_formula_for(PerturbationKind kind) {
  return is_semantic_related(kind) ? AsrFormula::kSemanticRelated
                                   : AsrFormula::kSemanticAgnostic;
}

std::optional<double> AsrReport::asr() const {
  if (base == 0) return std::nullopt;
  return static_cast<double>(shifted) / static_cast<double>(base);
}

std::string AsrReport::asr_text(int precision) const {
  auto v = asr();
  return v ? format_fixed(*v, precision) : "n/a";
}

void to_json(Json& j, const AsrReport& v) {
  Json trace = Json::array();
  for (const auto& t : v.trace) {
    trace.push_back(Json{{"sample_id", t.sample_id},
                         {"pref_ctrl", to_string(t.pref_ctrl)},
                         {"pref_exp", to_string(t.pref_exp)},
                         {"in_base", t.in_base},
                         {"shifted", t.shifted}});
  }
  j = Json{{"kind", to_string(v.kind)},
           {"formula", v.formula == AsrFormula::kSemanticAgnostic
                           ? "semantic_agnostic"
                           : "semantic_related"},
           {"base", v.base},
           {"shifted", v.shifted},
           {"trace", std::move(trace)},
           {"excluded", v.excluded}};
  if (auto a = v.asr()) {
    j["asr"] = *a;
  } else {
    j["asr"] = nullptr;
  }
}

AsrReport asr_with_formula(std::span<const SampleOutcome> outcomes,
                           PerturbationKind kind, AsrFormula formula) {
  AsrReport r;
  r.kind = kind;
  r.formula = formula;
  for (const auto& o : outcomes) {
    if (!o.pref_ctrl || !o.pref_exp) {
      r.excluded.push_back(o.sample_id);
      continue;
    }
    AsrTraceEntry e{o.sample_id, *o.pref_ctrl, *o.pref_exp, false, false};
    if (formula == AsrFormula::kSemanticAgnostic) {
      e.in_base = e.pref_ctrl != Preference::kA2;
      e.shifted = e.in_base && e.pref_exp == Preference::kA2;
    } else {
      e.in_base = e.pref_ctrl != Preference::kA1;
      e.shifted = e.in_base && e.pref_exp != Preference::kA1;
    }
    r.base += e.in_base;
    r.shifted += e.shifted;
    r.trace.push_back(std::move(e));
  }
  return r;
}

namespace {

void require_kind(std::span<const SampleOutcome> outcomes, PerturbationKind kind) {
  for (const auto& o : outcomes) {
    if (o.kind != kind) {
      throw ValidationError(fmt::format("outcome {} has kind {}, expected {}",
                                        o.sample_id, to_string(o.kind),
                                        to_string(kind)));
    }
  }
}

}  // namespace

AsrReport asr_agnostic(std::span<const SampleOutcome> outcomes,
                       PerturbationKind kind) {
  if (is_semantic_related(kind)) {
    throw ValidationError(std::string(to_string(kind)) +
                          " is semantic-related; use asr_semantic");
  }
  require_kind(outcomes, kind);
  return asr_with_formula(outcomes, kind, AsrFormula::kSemanticAgnostic);
}

AsrReport asr_semantic(std::span<const SampleOutcome> outcomes,
                       PerturbationKind kind) {
  if (!is_semantic_related(kind)) {
    throw ValidationError(std::string(to_string(kind)) +
                          " is semantic-agnostic; use asr_agnostic");
  }
  require_kind(outcomes, kind);
  return asr_with_formula(outcomes, kind, AsrFormula::kSemanticRelated);
}

AsrReport asr_for_kind(std::span<const SampleOutcome> outcomes,
                       PerturbationKind kind) {
  std::vector<SampleOutcome> selected;
  for (const auto& o : outcomes) {
    if (o.kind == kind) selected.push_back(o);
  }
  return is_semantic_related(kind) ? asr_semantic(selected, kind)
                                   : asr_agnostic(selected, kind);
}

PreferenceCounts enumerate_uniform_preferences(int votes) {
  if (votes < 1 || votes > 20) {
    throw ValidationError(fmt::format("enumeration over {} votes not supported", votes));
  }
  // Walk every vote vector in base 3 (0: A1 slot, 1: tie, 2: A2 slot).
  std::uint64_t total = 1;
  for (int i = 0; i < votes; ++i) total *= 3;
  PreferenceCounts c;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::int64_t halves = 0;
    for (std::uint64_t x = code; x; x /= 3) halves += static_cast<std::int64_t>(x % 3);
    switch (preference_from_halves(halves, votes)) {
      case Preference::kA1: ++c.a1; break;
      case Preference::kTie: ++c.tie; break;
      case Preference::kA2: ++c.a2; break;
    }
  }
  return c;
}

Fraction random_judge_asr_exact(int votes_per_sample, AsrFormula formula) {
  const auto c = enumerate_uniform_preferences(votes_per_sample);
  if (formula == AsrFormula::kSemanticAgnostic) return {c.a2, c.total()};
  return {c.a2 + c.tie, c.total()};
}

// ---------------------------------------------------------------------------
// Positional bias

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kGreen: return "green";
    case Severity::kYellow: return "yellow";
    case Severity::kRed: return "red";
  }
  return "?";
}

Severity severity_for(double diff) {
  const double d = std::abs(diff);
  if (d < 0.10) return Severity::kGreen;
  if (d <= 0.30) return Severity::kYellow;
  return Severity::kRed;
}

namespace {

double frac(std::uint64_t n, std::uint64_t d) {
  return d == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(d);
}

}  // namespace

double PositionalRow::first_fraction() const { return frac(first, valid()); }
double PositionalRow::tie_fraction() const { return frac(tie, valid()); }
double PositionalRow::second_fraction() const { return frac(second, valid()); }

PositionalReport positional_report(std::span<const Vote> votes) {
  PositionalReport report;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& v : votes) {
    auto [it, inserted] = row_of.try_emplace(v.judge_id, report.rows.size());
    if (inserted) report.rows.push_back(PositionalRow{v.judge_id});
    auto& row = report.rows[it->second];
    if (v.status != VoteStatus::kOk || !v.choice) continue;
    switch (*v.choice) {
      case Choice::kFirst: ++row.first; break;
      case Choice::kSecond: ++row.second; break;
      case Choice::kTie: ++row.tie; break;
      case Choice::kNotFamiliar: ++row.not_familiar; break;
    }
  }
  return report;
}

Table PositionalReport::render(int precision) const {
  Table t;
  t.header = {"Judge", "First", "Tie", "Second", "Diff", "Severity", "Votes",
              "NotFamiliar"};
  for (const auto& r : rows) {
    if (r.valid() == 0) {
      t.rows.push_back({r.judge_id, "", "", "", "", "", "0",
                        std::to_string(r.not_familiar)});
      continue;
    }
    t.rows.push_back({r.judge_id, format_fixed(r.first_fraction(), precision),
                      format_fixed(r.tie_fraction(), precision),
                      format_fixed(r.second_fraction(), precision),
                      format_fixed(r.diff(), precision),
                      std::string(to_string(r.severity())),
                      std::to_string(r.valid()), std::to_string(r.not_familiar)});
  }
  t.footer = {"Diff = First - Second; green |Diff| < 0.10, yellow 0.10-0.30, red > 0.30."};
  return t;
}

// ---------------------------------------------------------------------------
// Verbosity bias

std::optional<double> VerbosityBin::mean() const {
  if (count == 0) return std::nullopt;
  return static_cast<double>(half_sum) / (2.0 * static_cast<double>(count));
}

VerbosityCurve verbosity_curve(std::span<const LengthVote> votes,
                               std::span<const std::size_t> bin_edges) {
  if (bin_edges.empty() || bin_edges.front() != 0) {
    throw ValidationError("verbosity bins must start at 0");
  }
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (bin_edges[i] <= bin_edges[i - 1]) {
      throw ValidationError("verbosity bin edges must be strictly increasing");
    }
  }
  VerbosityCurve curve;
  for (std::size_t i = 0; i < bin_edges.size(); ++i) {
    VerbosityBin b;
    b.lo = bin_edges[i];
    if (i + 1 < bin_edges.size()) b.hi = bin_edges[i + 1];
    curve.bins.push_back(b);
  }
  for (const auto& v : votes) {
    if (v.choice == Choice::kNotFamiliar) continue;
    if (v.first_len == v.second_len) {
      ++curve.equal_length_excluded;
      continue;
    }
    const std::size_t gap = v.first_len > v.second_len ? v.first_len - v.second_len
                                                      : v.second_len - v.first_len;
    const bool first_longer = v.first_len > v.second_len;
    int halves = 1;
    if (v.choice == Choice::kFirst) halves = first_longer ? 2 : 0;
    if (v.choice == Choice::kSecond) halves = first_longer ? 0 : 2;
    // Last bin whose lower edge is <= gap.
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), gap);
    auto& bin = curve.bins[static_cast<std::size_t>(it - bin_edges.begin()) - 1];
    bin.half_sum += halves;
    ++bin.count;
  }
  return curve;
}

Table VerbosityCurve::render(int precision) const {
  Table t;
  t.header = {"Length gap", "Toward longer", "Votes"};
  for (const auto& b : bins) {
    const auto label = b.hi ? fmt::format("[{},{})", b.lo, *b.hi)
                            : fmt::format("[{},inf)", b.lo);
    const auto m = b.mean();
    t.rows.push_back({label, m ? format_fixed(*m, precision) : "n/a",
                      std::to_string(b.count)});
  }
  t.footer = {fmt::format("Control group only; {} equal-length vote(s) excluded.",
                          equal_length_excluded)};
  return t;
}

std::vector<LengthVote> control_length_votes(std::span<const ComparisonTask> tasks,
                                             std::span<const Vote> valid_votes,
                                             const SampleIndex& samples,
                                             const std::string& judge_id,
                                             const LengthFunction& length) {
  std::unordered_map<std::string, const ComparisonTask*> task_by_id;
  for (const auto& t : tasks) task_by_id.emplace(t.id, &t);
  std::vector<LengthVote> out;
  for (const auto& v : valid_votes) {
    if (v.judge_id != judge_id || !v.choice) continue;
    auto it = task_by_id.find(v.task_id);
    if (it == task_by_id.end() || it->second->group != Group::kControl) continue;
    const auto& t = *it->second;
    const auto& s = samples.at(t.sample_id);
    const auto& a1 = s.a1.text;
    const auto& a2 = s.a2.text;
    const bool a1_first = t.order == Order::kA1First;
    out.push_back({*v.choice, length(a1_first ? a1 : a2), length(a1_first ? a2 : a1)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Turnover

TurnoverReport turnover(std::span<const VoteStream> streams, int k_max,
                        std::span<const int> budgets) {
  if (k_max < 1) throw ValidationError("k_max must be >= 1");
  for (int k : budgets) {
    if (k < 1 || k > k_max) {
      throw ValidationError(fmt::format("budget {} outside [1, {}]", k, k_max));
    }
  }
  TurnoverReport report;
  report.k_max = k_max;
  for (int k : budgets) report.points.push_back({k, 0, 0});

  const auto km = static_cast<std::size_t>(k_max);
  for (const auto& s : streams) {
    if (s.a1_first.size() < km || s.a2_first.size() < km) {
      report.excluded.push_back(s.sample_id);
      continue;
    }
    // Prefix sums of half-unit scores per order.
    std::vector<std::int64_t> p1(km + 1, 0), p2(km + 1, 0);
    for (std::size_t i = 0; i < km; ++i) {
      p1[i + 1] = p1[i] + s.a1_first[i];
      p2[i + 1] = p2[i] + s.a2_first[i];
    }
    const auto converged = preference_from_halves(p1[km] + p2[km], 2 * k_max);
    for (auto& pt : report.points) {
      const auto k = static_cast<std::size_t>(pt.k);
      const auto budget = preference_from_halves(p1[k] + p2[k], 2 * pt.k);
      ++pt.total;
      if (budget != converged) ++pt.flipped;
    }
  }
  return report;
}

Table TurnoverReport::render(int precision) const {
  Table t;
  t.header = {"Votes per order", "Flipped", "Samples", "Proportion"};
  for (const auto& p : points) {
    t.rows.push_back({std::to_string(p.k), std::to_string(p.flipped),
                      std::to_string(p.total), format_fixed(p.proportion(), precision)});
  }
  t.footer = {fmt::format("Converged result uses {} votes per order; {} stream(s) "
                          "excluded for incomplete votes.",
                          k_max, excluded.size())};
  return t;
}

std::vector<VoteStream> vote_streams(std::span<const ComparisonTask> tasks,
                                     std::span<const Vote> valid_votes,
                                     const std::string& judge_id,
                                     std::optional<Group> group) {
  std::unordered_map<std::string, const ComparisonTask*> task_by_id;
  for (const auto& t : tasks) task_by_id.emplace(t.id, &t);

  struct Entry {
    int round;
    int halves;
  };
  std::map<std::pair<std::string, Group>, std::pair<std::vector<Entry>, std::vector<Entry>>>
      by_pair;
  for (const auto& t : tasks) {
    if (!group || t.group == *group) by_pair.try_emplace({t.sample_id, t.group});
  }
  for (const auto& v : valid_votes) {
    if (v.judge_id != judge_id || !v.choice) continue;
    auto it = task_by_id.find(v.task_id);
    if (it == task_by_id.end()) continue;
    const auto& t = *it->second;
    if (group && t.group != *group) continue;
    auto& slot = by_pair[{t.sample_id, t.group}];
    auto& list = t.order == Order::kA1First ? slot.first : slot.second;
    list.push_back({t.round, slot_score_halves(*v.choice, t.order)});
  }

  std::vector<VoteStream> out;
  out.reserve(by_pair.size());
  for (auto& [key, lists] : by_pair) {
    VoteStream s;
    s.sample_id = key.first;
    s.group = key.second;
    for (auto* src : {&lists.first, &lists.second}) {
      std::sort(src->begin(), src->end(),
                [](const Entry& a, const Entry& b) { return a.round < b.round; });
    }
    for (const auto& e : lists.first) s.a1_first.push_back(e.halves);
    for (const auto& e : lists.second) s.a2_first.push_back(e.halves);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ranking tables

std::vector<int> competition_ranks(std::span<const double> values, Better better) {
  std::vector<int> ranks(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      const bool beats = better == Better::kLower ? values[j] < values[i]
                                                  : values[j] > values[i];
      if (beats) ++ranks[i];
    }
  }
  return ranks;
}

RankingTable ranking_table(const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& column_labels,
                           const std::vector<std::vector<std::optional<double>>>& matrix,
                           Better better) {
  if (matrix.size() != row_labels.size()) {
    throw ValidationError("ranking matrix row count does not match labels");
  }
  RankingTable table;
  table.columns = column_labels;
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    if (matrix[r].size() != column_labels.size()) {
      throw ValidationError("ranking matrix row " + row_labels[r] +
                            " has the wrong number of columns");
    }
    RankingRow row;
    row.label = row_labels[r];
    for (std::size_t c = 0; c < column_labels.size(); ++c) {
      if (!matrix[r][c]) {
        throw ValidationError("incomplete ranking matrix: " + row_labels[r] + " / " +
                              column_labels[c] + " is undefined");
      }
      row.values.push_back(*matrix[r][c]);
    }
    row.ranks.assign(column_labels.size(), 0);
    table.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < column_labels.size(); ++c) {
    std::vector<double> column;
    for (const auto& row : table.rows) column.push_back(row.values[c]);
    const auto ranks = competition_ranks(column, better);
    for (std::size_t r = 0; r < table.rows.size(); ++r) table.rows[r].ranks[c] = ranks[r];
  }
  for (auto& row : table.rows) {
    double sum = 0;
    for (int rk : row.ranks) sum += rk;
    row.average = column_labels.empty() ? 0.0 : sum / static_cast<double>(column_labels.size());
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const RankingRow& a, const RankingRow& b) {
                     return a.average < b.average;
                   });
  return table;
}

Table RankingTable::render(int precision) const {
  Table t;
  t.header.push_back("Judge");
  for (const auto& c : columns) t.header.push_back(c);
  t.header.push_back("Avg. Ranking");
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.label};
    for (std::size_t c = 0; c < r.values.size(); ++c) {
      cells.push_back(fmt::format("{} ({})", format_fixed(r.values[c], precision),
                                  r.ranks[c]));
    }
    cells.push_back(format_fixed(r.average, 2));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

RankingTable ranking_table_from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::vector<std::string> header;
  std::vector<std::string> labels;
  std::vector<std::vector<std::optional<double>>> matrix;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (header.empty()) {
      header = std::move(cells);
      continue;
    }
    if (cells.size() != header.size()) {
      throw ValidationError("ASR matrix row has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(header.size()));
    }
    labels.push_back(cells[0]);
    std::vector<std::optional<double>> row;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i] == "n/a" || cells[i].empty()) {
        row.push_back(std::nullopt);
        continue;
      }
      try {
        row.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw ValidationError("ASR matrix cell '" + cells[i] + "' is not a number");
      }
    }
    matrix.push_back(std::move(row));
  }
  if (header.size() < 2) throw ValidationError("ASR matrix needs at least one column");
  return ranking_table(labels, {header.begin() + 1, header.end()}, matrix);
}

// ---------------------------------------------------------------------------
// Chain-of-thought comparison

CotTable cot_comparison(std::span<const CotRun> runs) {
  if (runs.empty()) throw ValidationError("cot comparison needs at least one run");
  std::set<std::string> reference_ids;
  for (const auto& o : runs.front().outcomes) reference_ids.insert(o.sample_id);
  for (const auto& run : runs) {
    std::set<std::string> ids;
    for (const auto& o : run.outcomes) ids.insert(o.sample_id);
    if (run.dataset_hash != runs.front().dataset_hash || ids != reference_ids) {
      throw ValidationError("cot comparison runs use mismatched datasets");
    }
  }

  CotTable table;
  for (const auto& run : runs) table.modes.push_back(run.mode);

  std::set<PerturbationKind> kinds;
  for (const auto& o : runs.front().outcomes) kinds.insert(o.kind);

  auto add_row = [&](PerturbationKind kind, std::string metric, Better better,
                     auto&& value_of) {
    CotRow row;
    row.kind = kind;
    row.metric = std::move(metric);
    std::vector<double> defined;
    for (const auto& run : runs) {
      row.values.push_back(value_of(run));
      if (row.values.back()) defined.push_back(*row.values.back());
    }
    for (const auto& v : row.values) {
      if (!v) {
        row.ranks.push_back(std::nullopt);
        continue;
      }
      int rank = 1;
      for (double d : defined) {
        if (better == Better::kLower ? d < *v : d > *v) ++rank;
      }
      row.ranks.push_back(rank);
    }
    table.rows.push_back(std::move(row));
  };

  for (PerturbationKind kind : kinds) {
    if (kind == PerturbationKind::kFactualError) {
      add_row(kind, "Acc", Better::kHigher, [&](const CotRun& run) -> std::optional<double> {
        std::size_t n = 0, correct = 0;
        for (const auto& o : run.outcomes) {
          if (o.kind != kind || !o.pref_exp) continue;
          ++n;
          correct += *o.pref_exp == Preference::kA1;
        }
        if (n == 0) return std::nullopt;
        return static_cast<double>(correct) / static_cast<double>(n);
      });
    }
    add_row(kind, "ASR", Better::kLower, [&](const CotRun& run) {
      return asr_for_kind(run.outcomes, kind).asr();
    });
  }
  return table;
}

Table CotTable::render(int precision) const {
  Table t;
  t.header = {"Perturbation", "Metric"};
  for (auto m : modes) t.header.emplace_back(to_string(m));
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::string(to_string(r.kind)), r.metric};
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      cells.push_back(r.values[i] ? fmt::format("{} ({})",
                                                format_fixed(*r.values[i], precision),
                                                *r.ranks[i])
                                  : "n/a");
    }
    t.rows.push_back(std::move(cells));
  }
  t.footer = {
      "Acc: fraction of evaluable experimental FactualError samples preferring A1 "
      "(convention; not an exact-match accuracy).",
      "Ranks are per row: higher Acc and lower ASR rank first."};
  return t;
}

}  // namespace judgeprobe
