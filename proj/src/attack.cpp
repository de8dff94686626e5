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

#include "judgeprobe/attack.hpp"

#include <fmt/format.h>

#include <map>
#include <unordered_map>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/hashing.hpp"

namespace judgeprobe {

std::string_view to_string(ResearchQuestion v) {
  return v == ResearchQuestion::kRQ1 ? "RQ1" : "RQ2";
}

ResearchQuestion parse_research_question(std::string_view s) {
  if (s == "RQ1" || s == "rq1") return ResearchQuestion::kRQ1;
  if (s == "RQ2" || s == "rq2") return ResearchQuestion::kRQ2;
  throw ValidationError("unknown research question '" + std::string(s) + "'");
}

WeaknessRecipe WeaknessRecipe::injected_flaw(PerturbationKind kind) {
  if (!is_semantic_related(kind)) {
    throw ValidationError(fmt::format("flaw kind {} is not semantic-related", to_string(kind)));
  }
  WeaknessRecipe r;
  r.type = Type::kInjectedFlaw;
  r.flaw = kind;
  return r;
}

WeaknessRecipe WeaknessRecipe::weaker_generator(std::string generator) {
  WeaknessRecipe r;
  r.type = Type::kWeakerGenerator;
  r.generator = std::move(generator);
  return r;
}

void to_json(Json& j, const WeaknessRecipe& v) {
  if (v.type == WeaknessRecipe::Type::kInjectedFlaw) {
    j = Json{{"type", "injected_flaw"}, {"flaw", to_string(*v.flaw)}};
  } else {
    j = Json{{"type", "weaker_generator"}, {"generator", v.generator}};
  }
}

void from_json(const Json& j, WeaknessRecipe& v) {
  const auto type = j.at("type").get<std::string>();
  if (type == "injected_flaw") {
    v = WeaknessRecipe::injected_flaw(parse_perturbation_kind(j.at("flaw").get<std::string>()));
  } else if (type == "weaker_generator") {
    v = WeaknessRecipe::weaker_generator(j.at("generator").get<std::string>());
  } else {
    throw ValidationError("unknown weakness recipe '" + type + "'");
  }
}

void to_json(Json& j, const WeakSet& v) {
  j = Json{{"label", v.label}, {"recipe", v.recipe}, {"answers", v.answers}};
}

void from_json(const Json& j, WeakSet& v) {
  v.label = j.at("label").get<std::string>();
  v.recipe = j.at("recipe").get<WeaknessRecipe>();
  v.answers = j.at("answers").get<std::vector<Answer>>();
}

void to_json(Json& j, const AttackColumn& v) {
  j = Json{{"label", v.label}, {"weak_set", v.weak_set}, {"deception", to_string(v.deception)}};
}

void from_json(const Json& j, AttackColumn& v) {
  v.label = j.at("label").get<std::string>();
  v.weak_set = j.at("weak_set").get<std::size_t>();
  v.deception = parse_perturbation_kind(j.at("deception").get<std::string>());
}

void to_json(Json& j, const AttackExperiment& v) {
  j = Json{{"rq", to_string(v.rq)},
           {"questions", v.questions},
           {"anchor_generator", v.anchor_generator},
           {"anchors", v.anchors},
           {"weak_sets", v.weak_sets},
           {"perturbed", v.perturbed},
           {"columns", v.columns},
           {"random_baseline", v.random_baseline}};
}

void from_json(const Json& j, AttackExperiment& v) {
  v.rq = parse_research_question(j.at("rq").get<std::string>());
  v.questions = j.at("questions").get<std::vector<Question>>();
  v.anchor_generator = j.at("anchor_generator").get<std::string>();
  v.anchors = j.at("anchors").get<std::vector<Answer>>();
  v.weak_sets = j.at("weak_sets").get<std::vector<WeakSet>>();
  v.perturbed = j.at("perturbed").get<std::vector<Answer>>();
  v.columns = j.at("columns").get<std::vector<AttackColumn>>();
  v.random_baseline = j.value("random_baseline", true);
  validate_experiment(v);
}

namespace {

const Answer* perturbed_for(const AttackExperiment& e, const Answer& parent,
                            PerturbationKind kind) {
  const Answer* found = nullptr;
  for (const auto& a : e.perturbed) {
    if (a.parent_answer_id == parent.id && a.perturbation == kind) {
      if (found != nullptr) {
        throw ValidationError(fmt::format("answer {} has two {} perturbations", parent.id,
                                          to_string(kind)));
      }
      found = &a;
    }
  }
  return found;
}

}  // namespace

void validate_experiment(const AttackExperiment& e) {
  const auto n = e.questions.size();
  auto check_set = [&](std::span<const Answer> answers, const std::string& what) {
    if (answers.size() != n) {
      throw ValidationError(fmt::format("{} has {} answers for {} questions", what,
                                        answers.size(), n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (answers[i].question_id != e.questions[i].id) {
        throw ValidationError(fmt::format("{} answer {} is not for question {}", what,
                                          answers[i].id, e.questions[i].id));
      }
    }
  };
  check_set(e.anchors, "anchor set");
  for (const auto& w : e.weak_sets) check_set(w.answers, "weak set " + w.label);

  for (const auto& p : e.perturbed) {
    bool parent_found = false;
    for (const auto& w : e.weak_sets) {
      for (const auto& a : w.answers) parent_found = parent_found || p.parent_answer_id == a.id;
    }
    if (!parent_found) {
      throw ValidationError("perturbed answer " + p.id + " has no parent in any weak set");
    }
  }
  for (const auto& c : e.columns) {
    if (c.weak_set >= e.weak_sets.size()) {
      throw ValidationError("column " + c.label + " references a missing weak set");
    }
    for (const auto& a : e.weak_sets[c.weak_set].answers) {
      if (perturbed_for(e, a, c.deception) == nullptr) {
        throw ValidationError(fmt::format("column {} lacks a {} perturbation of {}", c.label,
                                          to_string(c.deception), a.id));
      }
    }
  }
}

namespace {

void require_verified(std::span<const Question> questions) {
  for (const auto& q : questions) {
    if (q.status != QuestionStatus::kVerified) {
      throw ValidationError("attack question " + q.id + " is not verified");
    }
  }
}

void collect_failures(std::vector<std::string>& gaps, const std::string& stage,
                      const std::vector<GenerationFailure>& failures) {
  for (const auto& f : failures) {
    gaps.push_back(fmt::format("{}: {} ({}: {})", stage, f.key, f.error_class, f.message));
  }
}

void throw_gaps(const std::vector<std::string>& gaps) {
  if (gaps.empty()) return;
  std::string msg = fmt::format("attack build is missing {} item(s):", gaps.size());
  for (const auto& g : gaps) msg += "\n  " + g;
  throw AssemblyError(msg);
}

}  // namespace

AttackExperiment build_rq1(std::span<const Question> questions, const GenerationContext& anchor,
                           const GenerationContext& perturber, PerturbationKind flaw,
                           std::span<const PerturbationKind> deceptions) {
  const auto recipe = WeaknessRecipe::injected_flaw(flaw);
  for (auto d : deceptions) {
    if (is_semantic_related(d)) {
      throw ValidationError(fmt::format("deception kind {} is not semantic-agnostic",
                                        to_string(d)));
    }
  }
  require_verified(questions);

  std::vector<std::string> gaps;
  auto anchors = generate_single_answers(anchor, questions, AnswerVariant::kRaw1, 0, "anchor");
  auto preflaw = generate_single_answers(anchor, questions, AnswerVariant::kRaw2, 1, "preflaw");
  collect_failures(gaps, "anchor answers", anchors.failures);
  collect_failures(gaps, "pre-flaw answers", preflaw.failures);
  throw_gaps(gaps);

  const PerturbationKind flaw_kinds[] = {flaw};
  auto flawed = perturb_targets(perturber, questions, preflaw.items, flaw_kinds);
  collect_failures(gaps, "flawed answers", flawed.failures);
  throw_gaps(gaps);

  auto dressed = perturb_targets(perturber, questions, flawed.items, deceptions);
  collect_failures(gaps, "perturbed answers", dressed.failures);
  throw_gaps(gaps);

  AttackExperiment e;
  e.rq = ResearchQuestion::kRQ1;
  e.questions.assign(questions.begin(), questions.end());
  e.anchor_generator = anchor.config.generator_id();
  e.anchors = std::move(anchors.items);
  e.weak_sets.push_back({std::string(to_string(flaw)), recipe, std::move(flawed.items)});
  e.perturbed = std::move(dressed.items);
  for (auto d : deceptions) e.columns.push_back({std::string(short_name(d)), 0, d});
  validate_experiment(e);
  return e;
}

AttackExperiment build_rq2(std::span<const Question> questions, const GenerationContext& anchor,
                           std::span<const GenerationContext> weak,
                           const GenerationContext& perturber, PerturbationKind deception) {
  if (weak.empty()) throw ValidationError("RQ2 needs at least one weak generator");
  if (is_semantic_related(deception)) {
    throw ValidationError(fmt::format("deception kind {} is not semantic-agnostic",
                                      to_string(deception)));
  }
  require_verified(questions);

  std::vector<std::string> gaps;
  AttackExperiment e;
  e.rq = ResearchQuestion::kRQ2;
  e.questions.assign(questions.begin(), questions.end());
  e.anchor_generator = anchor.config.generator_id();

  auto anchors = generate_single_answers(anchor, questions, AnswerVariant::kRaw1, 0, "anchor");
  collect_failures(gaps, "anchor answers", anchors.failures);
  e.anchors = std::move(anchors.items);

  auto add_weak = [&](const GenerationContext& ctx, int index) {
    auto answers = generate_single_answers(ctx, questions, AnswerVariant::kRaw2, index, "weak");
    const auto& label = ctx.config.generator_id();
    collect_failures(gaps, "weak answers " + label, answers.failures);
    e.weak_sets.push_back(
        {label, WeaknessRecipe::weaker_generator(label), std::move(answers.items)});
  };
  for (const auto& w : weak) add_weak(w, 0);
  add_weak(anchor, 1);
  throw_gaps(gaps);

  const PerturbationKind kinds[] = {deception};
  for (std::size_t i = 0; i < e.weak_sets.size(); ++i) {
    auto dressed = perturb_targets(perturber, questions, e.weak_sets[i].answers, kinds);
    collect_failures(gaps, "perturbed answers " + e.weak_sets[i].label, dressed.failures);
    for (auto& a : dressed.items) e.perturbed.push_back(std::move(a));
    e.columns.push_back({e.weak_sets[i].label, i, deception});
  }
  throw_gaps(gaps);
  validate_experiment(e);
  return e;
}

AttackPlan plan_attack(const AttackExperiment& e, int votes_per_order, std::uint64_t seed) {
  validate_experiment(e);
  AttackPlan plan;
  const auto n = e.questions.size();

  auto base = [&](std::size_t q) {
    Sample s;
    s.question = e.questions[q];
    s.a1 = e.anchors[q];
    return s;
  };
  const std::string rq(to_string(e.rq));

  plan.control_sample.resize(e.weak_sets.size());
  for (std::size_t w = 0; w < e.weak_sets.size(); ++w) {
    for (std::size_t q = 0; q < n; ++q) {
      auto s = base(q);
      s.id = "s-" + content_id({"attack-control", rq, e.weak_sets[w].label, s.question.id});
      s.a2 = e.weak_sets[w].answers[q];
      s.a2p = s.a2;  // never presented: control comparisons only
      plan.control_sample[w].push_back(s.id);
      plan.samples.push_back(std::move(s));
    }
  }
  plan.column_sample.resize(e.columns.size());
  for (std::size_t c = 0; c < e.columns.size(); ++c) {
    const auto& col = e.columns[c];
    for (std::size_t q = 0; q < n; ++q) {
      auto s = base(q);
      s.id = "s-" + content_id({"attack", rq, col.label, to_string(col.deception),
                                s.question.id});
      s.kind = col.deception;
      s.a2 = e.weak_sets[col.weak_set].answers[q];
      s.a2p = *perturbed_for(e, s.a2, col.deception);
      plan.column_sample[c].push_back(s.id);
      plan.samples.push_back(std::move(s));
    }
  }

  std::unordered_map<std::string, Group> wanted;
  for (const auto& ids : plan.control_sample) {
    for (const auto& id : ids) wanted.emplace(id, Group::kControl);
  }
  for (const auto& ids : plan.column_sample) {
    for (const auto& id : ids) wanted.emplace(id, Group::kExperimental);
  }
  for (auto& t : build_schedule(plan.samples, votes_per_order, seed)) {
    if (wanted.at(t.sample_id) == t.group) plan.tasks.push_back(std::move(t));
  }
  return plan;
}

AttackResult run_attack(const AttackExperiment& e, std::span<const JudgeSpec> judges,
                        int votes_per_order, std::uint64_t seed,
                        const JudgeRunOptions& options) {
  const auto plan = plan_attack(e, votes_per_order, seed);
  const SampleIndex index(plan.samples);

  std::vector<JudgeSpec> all(judges.begin(), judges.end());
  if (e.random_baseline) {
    bool present = false;
    for (const auto& j : all) present = present || j.id == "Random";
    if (!present) {
      all.push_back(JudgeSpec{"Random", ScriptedJudge{ScriptedPolicy::uniform_random(), seed},
                              CotMode::kNone});
    }
  }

  std::unordered_map<std::string, const ComparisonTask*> task_by_id;
  for (const auto& t : plan.tasks) task_by_id.emplace(t.id, &t);
  std::unordered_map<std::string, std::size_t> weak_of_control;
  for (std::size_t w = 0; w < plan.control_sample.size(); ++w) {
    for (const auto& id : plan.control_sample[w]) weak_of_control.emplace(id, w);
  }

  AttackResult result;
  for (const auto& c : e.columns) result.column_labels.push_back(c.label);
  for (const auto& w : e.weak_sets) result.weak_labels.push_back(w.label);

  for (const auto& judge : all) {
    auto run = run_judge(judge, plan.tasks, index, options);
    const auto valid = filter_votes(run.votes, FilterPolicy{});
    const auto agg = aggregate_votes(plan.tasks, valid, judge.id);

    std::map<std::pair<std::string, Group>, Preference> pref;
    for (const auto& s : agg.scores) pref[{s.sample_id, s.group}] = s.preference;
    auto lookup = [&](const std::string& id, Group g) -> std::optional<Preference> {
      auto it = pref.find({id, g});
      if (it == pref.end()) return std::nullopt;
      return it->second;
    };

    AttackJudgeResult jr;
    jr.judge_id = judge.id;
    jr.unevaluable = agg.unevaluable;
    for (std::size_t c = 0; c < e.columns.size(); ++c) {
      const auto& col = e.columns[c];
      std::vector<SampleOutcome> outcomes;
      for (std::size_t q = 0; q < e.questions.size(); ++q) {
        outcomes.push_back({plan.column_sample[c][q], col.deception,
                            lookup(plan.control_sample[col.weak_set][q], Group::kControl),
                            lookup(plan.column_sample[c][q], Group::kExperimental)});
      }
      jr.columns.push_back(
          asr_with_formula(outcomes, col.deception, AsrFormula::kSemanticAgnostic));
    }

    jr.weak_share.resize(e.weak_sets.size());
    for (const auto& v : valid) {
      const auto& t = *task_by_id.at(v.task_id);
      if (t.group != Group::kControl || !v.choice) continue;
      auto& share = jr.weak_share[weak_of_control.at(t.sample_id)];
      switch (slot_score_halves(*v.choice, t.order)) {
        case 0: ++share.anchor; break;
        case 1: ++share.tie; break;
        default: ++share.weak; break;
      }
    }
    result.judges.push_back(std::move(jr));
    for (auto& v : run.votes) result.votes.push_back(std::move(v));
  }
  return result;
}

std::optional<RankingTable> AttackResult::ranking() const {
  if (column_labels.empty()) return std::nullopt;
  std::vector<std::string> rows;
  std::vector<std::vector<std::optional<double>>> matrix;
  for (const auto& j : judges) {
    rows.push_back(j.judge_id);
    auto& row = matrix.emplace_back();
    for (const auto& r : j.columns) {
      if (!r.asr()) return std::nullopt;
      row.push_back(r.asr());
    }
  }
  return ranking_table(rows, column_labels, matrix, Better::kLower);
}

Table AttackResult::asr_table(int precision) const {
  Table t;
  t.header.push_back("Judge");
  for (const auto& c : column_labels) t.header.push_back(c);
  for (const auto& j : judges) {
    std::vector<std::string> row{j.judge_id};
    for (const auto& r : j.columns) row.push_back(r.asr_text(precision));
    t.rows.push_back(std::move(row));
  }
  t.footer = {"ASR uses the semantic-agnostic formula for every column."};
  return t;
}

Table AttackResult::weak_share_table(int precision) const {
  Table t;
  t.header.push_back("Judge");
  for (const auto& w : weak_labels) {
    t.header.push_back(w + " anchor");
    t.header.push_back(w + " tie");
    t.header.push_back(w + " weak");
  }
  auto pct = [&](std::uint64_t n, std::uint64_t d) {
    return d == 0 ? std::string("n/a")
                  : format_fixed(static_cast<double>(n) / static_cast<double>(d), precision);
  };
  for (const auto& j : judges) {
    std::vector<std::string> row{j.judge_id};
    for (const auto& s : j.weak_share) {
      row.push_back(pct(s.anchor, s.total()));
      row.push_back(pct(s.tie, s.total()));
      row.push_back(pct(s.weak, s.total()));
    }
    t.rows.push_back(std::move(row));
  }
  t.footer = {"Share of control-group votes (anchor vs. weak answer, ties separate)."};
  return t;
}

}  // namespace judgeprobe
