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

#include "judgeprobe/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "judgeprobe/attack.hpp"
#include "judgeprobe/datagen.hpp"
#include "judgeprobe/errors.hpp"
#include "judgeprobe/judge.hpp"
#include "judgeprobe/metrics.hpp"
#include "judgeprobe/pipeline.hpp"
#include "judgeprobe/service.hpp"
#include "judgeprobe/store.hpp"
#include "judgeprobe/text.hpp"

namespace fs = std::filesystem;

namespace judgeprobe {

namespace {

struct Config {
  std::map<std::string, GeneratorConfig> generators;
  std::map<std::string, JudgeSpec> judges;
  std::optional<FilterPolicy> filter;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + " is not valid JSON: " + e.what());
  }
}

Config load_config(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  const auto j = read_json_file(path);
  for (const auto& [name, g] : j.value("generators", Json::object()).items()) {
    auto cfg = g.get<GeneratorConfig>();
    if (cfg.id.empty()) cfg.id = name;
    c.generators.emplace(name, std::move(cfg));
  }
  for (const auto& [name, spec] : j.value("judges", Json::object()).items()) {
    Json with_id = spec;
    if (!with_id.contains("id")) with_id["id"] = name;
    c.judges.emplace(name, with_id.get<JudgeSpec>());
  }
  if (j.contains("filter")) c.filter = j.at("filter").get<FilterPolicy>();
  return c;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

template <typename T>
std::vector<T> read_staging(const fs::path& path, std::string_view hint) {
  if (!fs::exists(path)) {
    throw NotFoundError(fmt::format("{} not found; run `{}` first", path.string(), hint));
  }
  const auto load = read_ledger(path);
  if (!load.quarantined.empty()) {
    throw IntegrityError(path.string() + " ends with a truncated record");
  }
  std::vector<T> out;
  for (const auto& r : load.records) out.push_back(r.get<T>());
  return out;
}

template <typename T>
void write_staging(const fs::path& path, const std::vector<T>& items) {
  std::vector<Json> records;
  records.reserve(items.size());
  for (const auto& i : items) records.emplace_back(i);
  rewrite_ledger(path, records);
}

std::vector<PerturbationKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<PerturbationKind> out;
  for (const auto& n : names) {
    for (const auto& part : split(n, ',')) {
      if (!part.empty()) out.push_back(parse_perturbation_kind(part));
    }
  }
  return out;
}

OracleTable read_oracle_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  OracleTable table;
  bool header = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (header) {
      header = false;
      if (cells.size() >= 2 && cells[0] == "sample_id") continue;
    }
    if (cells.size() == 2) {
      table.set(cells[0], parse_preference(cells[1]));
    } else if (cells.size() == 3) {
      table.set(cells[0], parse_group(cells[2]), parse_preference(cells[1]));
    } else {
      throw ValidationError("oracle file rows must be sample_id,preference[,group]");
    }
  }
  return table;
}

ScriptedPolicy parse_policy(std::string_view spec) {
  // random | constant:<Choice> | longer | oracle:<csv> | flip:<p>:<base>
  const auto colon = spec.find(':');
  const auto head = spec.substr(0, colon);
  const auto rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "random") return ScriptedPolicy::uniform_random();
  if (head == "longer") return ScriptedPolicy::longer_wins();
  if (head == "constant") return ScriptedPolicy::constant(parse_choice(rest));
  if (head == "oracle") return ScriptedPolicy::oracle(read_oracle_csv(std::string(rest)));
  if (head == "flip") {
    const auto c2 = rest.find(':');
    if (c2 == std::string_view::npos) throw UsageError("flip policy needs flip:<p>:<base>");
    double p = 0;
    try {
      p = std::stod(std::string(rest.substr(0, c2)));
    } catch (const std::exception&) {
      throw UsageError("flip probability '" + std::string(rest.substr(0, c2)) + "' is not a number");
    }
    return ScriptedPolicy::flip(parse_policy(rest.substr(c2 + 1)), p);
  }
  throw UsageError("unknown scripted policy '" + std::string(spec) + "'");
}

JudgeSpec parse_judge(const std::string& spec, const std::string& id, std::uint64_t seed,
                      CotMode mode, const Config& config) {
  JudgeSpec j;
  j.id = id.empty() ? spec : id;
  j.cot_mode = mode;
  if (spec.rfind("scripted:", 0) == 0) {
    j.kind = ScriptedJudge{parse_policy(std::string_view(spec).substr(9)), seed};
  } else if (spec == "human") {
    j.kind = HumanJudge{};
  } else if (spec.rfind("remote:", 0) == 0) {
    const auto ref = spec.substr(7);
    if (auto it = config.judges.find(ref); it != config.judges.end()) {
      j = it->second;
      if (!id.empty()) j.id = id;
      j.cot_mode = mode;
    } else {
      j.kind = RemoteJudge{read_json_file(ref).get<EndpointConfig>()};
    }
    if (j.judge_kind() != JudgeKind::kRemote) throw UsageError("judge " + ref + " is not remote");
  } else if (auto it = config.judges.find(spec); it != config.judges.end()) {
    j = it->second;
    if (!id.empty()) j.id = id;
  } else {
    throw UsageError("unknown judge spec '" + spec + "'");
  }
  return j;
}

GeneratorConfig resolve_generator(const std::string& name, std::uint64_t seed,
                                  const Config& config) {
  if (name == "stub" || name.rfind("stub:", 0) == 0) {
    GeneratorConfig g;
    g.stub = true;
    g.stub_seed = seed;
    g.id = name == "stub" ? "stub" : name.substr(5);
    g.endpoint.model = g.id;
    return g;
  }
  auto it = config.generators.find(name);
  if (it == config.generators.end()) {
    throw NotFoundError("generator '" + name + "' is not defined in --config");
  }
  return it->second;
}

void emit_table(std::ostream& out, const Table& t, const std::string& format) {
  if (format == "csv") {
    out << t.to_csv();
  } else {
    out << t.to_text();
  }
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& p : split(s, ',')) {
    if (p.empty()) continue;
    try {
      out.push_back(std::stoi(p));
    } catch (const std::exception&) {
      throw UsageError("'" + p + "' is not an integer");
    }
  }
  return out;
}

void report_failures(const fs::path& path, const std::vector<GenerationFailure>& failures) {
  std::vector<Json> records(failures.begin(), failures.end());
  rewrite_ledger(path, records);
  if (!failures.empty()) {
    throw TransportError(fmt::format("{} generation request(s) failed; see {}", failures.size(),
                                     path.string()));
  }
}

std::atomic<HttpFrontend*> g_serving{nullptr};

extern "C" void stop_serving(int) {
  if (auto* f = g_serving.load()) f->stop();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const CliEnvironment& env) {
  CLI::App app{"Bias measurement harness for human and model judges", "judgeprobe"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string run_id;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--run", run_id, "Run id");
  app.add_option("--seed", seed, "Seed for schedules, scripted judges and stubs");
  app.add_option("--out", out_dir, "Root directory for all artifacts");
  app.add_option("--config", config_path, "JSON file defining generators, judges, filter");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate questions, answers, perturbations");
  gen->require_subcommand(1)->fallthrough();
  std::string generator = "stub";
  int per_level = 30;
  std::vector<std::string> level_names;
  std::vector<std::string> kind_names;
  int fan_out = 0;
  auto* gen_q = gen->add_subcommand("questions", "One question prompt per Bloom level");
  gen_q->add_option("--generator", generator, "stub, stub:<id>, or a --config generator");
  gen_q->add_option("--per-level", per_level, "Questions per level (1-100)");
  gen_q->add_option("--levels", level_names, "Subset of levels")->delimiter(',');
  gen_q->add_option("--fan-out", fan_out);
  auto* gen_a = gen->add_subcommand("answers", "Two raw answers per verified question");
  gen_a->add_option("--generator", generator);
  gen_a->add_option("--fan-out", fan_out);
  auto* gen_p = gen->add_subcommand("perturb", "Perturbed versions of each raw_2 answer");
  gen_p->add_option("--generator", generator);
  gen_p->add_option("--kinds", kind_names, "Perturbation kinds")->delimiter(',');
  gen_p->add_option("--fan-out", fan_out);

  // review
  auto* review = app.add_subcommand("review", "Manual review decisions");
  review->require_subcommand(1)->fallthrough();
  std::string review_file;
  auto* review_ingest = review->add_subcommand("ingest", "Apply a review CSV");
  review_ingest->add_option("--file", review_file, "question_id,verdict,level,note")->required();

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Dataset assembly");
  dataset->require_subcommand(1)->fallthrough();
  auto* assemble = dataset->add_subcommand("assemble", "Build samples from staged artifacts");
  assemble->add_option("--kinds", kind_names)->delimiter(',');

  // schedule
  std::string dataset_hash;
  int k = 3;
  std::vector<std::string> group_names;
  auto* schedule = app.add_subcommand("schedule", "Create a run with a balanced schedule");
  schedule->add_option("--dataset", dataset_hash, "Dataset hash")->required();
  schedule->add_option("--k", k, "Votes per order");
  schedule->add_option("--groups", group_names)->delimiter(',');

  // judge run
  auto* judge = app.add_subcommand("judge", "Judge execution");
  judge->require_subcommand(1)->fallthrough();
  std::vector<std::string> judge_specs;
  std::string judge_id;
  std::string cot_mode_name = "none";
  auto* judge_run = judge->add_subcommand("run", "Collect votes from one judge");
  judge_run->add_option("--judge", judge_specs, "Judge spec")->required()->expected(1);
  judge_run->add_option("--judge-id", judge_id);
  judge_run->add_option("--cot-mode", cot_mode_name);
  judge_run->add_option("--fan-out", fan_out);

  // aggregate
  std::optional<std::int64_t> min_elapsed;
  bool keep_not_familiar = false;
  bool keep_invalid = false;
  auto* aggregate = app.add_subcommand("aggregate", "Write aggregates and reports for a run");
  aggregate->add_option("--min-elapsed", min_elapsed, "Human vote time floor (ms)");
  aggregate->add_flag("--keep-not-familiar", keep_not_familiar);
  aggregate->add_flag("--keep-invalid", keep_invalid);

  // report
  auto* report = app.add_subcommand("report", "Read-only reports");
  report->require_subcommand(1)->fallthrough();
  std::string format = "text";
  std::vector<std::string> judge_filter;
  std::string asr_matrix;
  std::string budgets;
  std::optional<int> k_max;
  std::string group_name;
  std::string edges;
  std::vector<std::string> run_list;
  std::string better = "lower";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    sub->add_option("--judge", judge_filter, "Restrict to judges")->delimiter(',');
  };
  auto* rep_asr = report->add_subcommand("asr", "ASR per judge and kind");
  add_common(rep_asr);
  auto* rep_pos = report->add_subcommand("positional", "First/Tie/Second shares");
  add_common(rep_pos);
  auto* rep_verb = report->add_subcommand("verbosity", "Vote value vs. length gap");
  add_common(rep_verb);
  rep_verb->add_option("--edges", edges, "Bin lower edges, e.g. 0,10,20,30,40");
  auto* rep_turn = report->add_subcommand("turnover", "Flipped share vs. vote budget");
  add_common(rep_turn);
  rep_turn->add_option("--budgets", budgets, "e.g. 1,3,5,10,20,45");
  rep_turn->add_option("--k-max", k_max);
  rep_turn->add_option("--group", group_name);
  auto* rep_rank = report->add_subcommand("ranking", "Judge ranking over kinds");
  add_common(rep_rank);
  rep_rank->add_option("--asr-matrix", asr_matrix, "CSV matrix instead of a run");
  rep_rank->add_option("--better", better)->check(CLI::IsMember({"lower", "higher"}));
  auto* rep_cot = report->add_subcommand("cot", "Compare chain-of-thought modes");
  add_common(rep_cot);
  rep_cot->add_option("--runs", run_list, "Runs to compare (one judge each)")->delimiter(',');

  // attack
  auto* attack = app.add_subcommand("attack", "Deception experiments");
  attack->require_subcommand(1)->fallthrough();
  std::string name;
  std::string rq_name = "RQ1";
  std::string anchor = "stub";
  std::string perturber;
  std::string flaw_name = "FactualError";
  std::vector<std::string> weak_names;
  int limit = 60;
  bool no_random = false;
  auto* attack_build = attack->add_subcommand("build", "Generate an attack experiment");
  attack_build->add_option("--name", name)->required();
  attack_build->add_option("--rq", rq_name)->check(CLI::IsMember({"RQ1", "RQ2", "rq1", "rq2"}));
  attack_build->add_option("--anchor", anchor);
  attack_build->add_option("--perturber", perturber);
  attack_build->add_option("--flaw", flaw_name);
  attack_build->add_option("--deceptions", kind_names)->delimiter(',');
  attack_build->add_option("--weak", weak_names)->delimiter(',');
  attack_build->add_option("--limit", limit, "Number of verified questions");
  attack_build->add_flag("--no-random", no_random, "Omit the random baseline row");
  attack_build->add_option("--fan-out", fan_out);
  auto* attack_run = attack->add_subcommand("run", "Run judges on an attack experiment");
  attack_run->add_option("--name", name)->required();
  attack_run->add_option("--judge", judge_specs)->required();
  attack_run->add_option("--k", k = 1);
  attack_run->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  attack_run->add_option("--fan-out", fan_out);

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  int idle_minutes = 30;
  auto* serve = app.add_subcommand("serve", "Human voting service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--static", static_dir, "UI bundle directory");
  serve->add_option("--idle-minutes", idle_minutes);

  std::vector<const char*> argv{"judgeprobe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << canonical(Json{{"error_class", "UsageError"}, {"message", e.what()}}) << "\n";
    return 2;
  }

  try {
    const Config config = load_config(config_path);
    Store store(out_dir);
    const fs::path staging = fs::path(out_dir) / "staging";
    auto need_run = [&] {
      if (run_id.empty()) throw UsageError("--run is required");
      return run_id;
    };
    auto make_ctx = [&](const GeneratorConfig& g, std::unique_ptr<ChatTransport>& holder) {
      holder = make_generator_transport(g, env.transport_factory);
      GenerationContext ctx;
      ctx.transport = holder.get();
      ctx.config = g;
      ctx.seed = seed;
      ctx.fan_out = fan_out;
      return ctx;
    };
    auto kinds_or_all = [&] {
      auto kinds = parse_kinds(kind_names);
      if (kinds.empty()) kinds.assign(kAllPerturbationKinds.begin(), kAllPerturbationKinds.end());
      return kinds;
    };

    if (gen_q->parsed()) {
      std::vector<BloomLevel> levels;
      for (const auto& l : level_names) levels.push_back(parse_bloom_level(l));
      if (levels.empty()) levels.assign(kAllBloomLevels.begin(), kAllBloomLevels.end());
      std::unique_ptr<ChatTransport> t;
      const auto ctx = make_ctx(resolve_generator(generator, seed, config), t);
      auto result = generate_questions(ctx, levels, per_level);
      write_staging(staging / "questions.ndjson", result.items);
      out << canonical(Json{{"questions", result.items.size()}}) << "\n";
      report_failures(staging / "failures-questions.ndjson", result.failures);
      return 0;
    }
    if (review_ingest->parsed()) {
      const auto questions = read_staging<Question>(staging / "questions.ndjson", "gen questions");
      const auto decisions = read_review_csv(read_text(review_file));
      const auto reviewed = ingest_review(decisions, questions);
      write_staging(staging / "reviewed.ndjson", reviewed);
      std::size_t verified = 0;
      for (const auto& q : reviewed) verified += q.status == QuestionStatus::kVerified;
      out << canonical(Json{{"questions", reviewed.size()}, {"verified", verified}}) << "\n";
      return 0;
    }
    if (gen_a->parsed()) {
      const auto questions = read_staging<Question>(staging / "reviewed.ndjson", "review ingest");
      std::unique_ptr<ChatTransport> t;
      const auto ctx = make_ctx(resolve_generator(generator, seed, config), t);
      auto result = generate_raw_answers(ctx, questions);
      write_staging(staging / "answers.ndjson", result.items);
      out << canonical(Json{{"answers", result.items.size()}}) << "\n";
      report_failures(staging / "failures-answers.ndjson", result.failures);
      return 0;
    }
    if (gen_p->parsed()) {
      const auto questions = read_staging<Question>(staging / "reviewed.ndjson", "review ingest");
      const auto answers = read_staging<Answer>(staging / "answers.ndjson", "gen answers");
      std::unique_ptr<ChatTransport> t;
      const auto ctx = make_ctx(resolve_generator(generator, seed, config), t);
      const auto kinds = kinds_or_all();
      auto result = perturb_answers(ctx, questions, answers, kinds);
      write_staging(staging / "perturbed.ndjson", result.items);
      std::size_t flagged = 0;
      for (const auto& a : result.items) flagged += a.flagged_for_review;
      out << canonical(Json{{"perturbed", result.items.size()}, {"flagged", flagged}}) << "\n";
      report_failures(staging / "failures-perturb.ndjson", result.failures);
      return 0;
    }
    if (assemble->parsed()) {
      const auto questions = read_staging<Question>(staging / "reviewed.ndjson", "review ingest");
      auto answers = read_staging<Answer>(staging / "answers.ndjson", "gen answers");
      for (auto& a : read_staging<Answer>(staging / "perturbed.ndjson", "gen perturb")) {
        answers.push_back(std::move(a));
      }
      const auto samples = assemble_dataset(questions, answers, kinds_or_all());
      const auto hash = store.put_dataset(samples);
      out << canonical(Json{{"dataset_hash", hash}, {"samples", samples.size()}}) << "\n";
      return 0;
    }
    if (schedule->parsed()) {
      std::vector<Group> groups;
      for (const auto& g : group_names) groups.push_back(parse_group(g));
      if (groups.empty()) groups.assign(kBothGroups.begin(), kBothGroups.end());
      const auto samples = store.load_dataset(dataset_hash);
      RunManifest m;
      m.run_id = need_run();
      m.dataset_hash = dataset_hash;
      m.seed = seed;
      m.votes_per_order = k;
      m.groups = groups;
      m.filter = config.filter.value_or(FilterPolicy{});
      m.created_at = creation_timestamp();
      const auto tasks = build_schedule(samples, k, seed, groups);
      store.create_run(m, tasks);
      out << canonical(Json{{"run_id", m.run_id}, {"tasks", tasks.size()}}) << "\n";
      return 0;
    }
    if (judge_run->parsed()) {
      const auto id = need_run();
      auto spec = parse_judge(judge_specs.front(), judge_id, seed, parse_cot_mode(cot_mode_name),
                              config);
      store.register_judge(id, spec);
      const auto run = store.load_run(id);
      std::set<std::string> voted;
      for (const auto& v : run.votes) {
        if (v.judge_id == spec.id) voted.insert(v.task_id);
      }
      std::vector<ComparisonTask> pending;
      for (const auto& t : run.tasks) {
        if (!voted.contains(t.id)) pending.push_back(t);
      }
      JudgeRunOptions options;
      options.transport_factory = env.transport_factory;
      options.fan_out = fan_out;
      const SampleIndex index(run.samples);
      auto result = run_judge(spec, pending, index, options);
      {
        LedgerWriter votes(store.segment(id, "votes"));
        for (const auto& v : result.votes) votes.append(Json(v));
      }
      if (!result.attempts.empty()) {
        LedgerWriter attempts(store.segment(id, "attempts"));
        for (const auto& [task_id, rec] : result.attempts) {
          attempts.append(Json{{"task_id", task_id},
                               {"judge_id", spec.id},
                               {"attempt", rec.attempt},
                               {"latency_ms", rec.latency_ms},
                               {"ok", rec.ok},
                               {"error", rec.error}});
        }
      }
      std::size_t invalid = 0, failed = 0;
      for (const auto& v : result.votes) {
        invalid += v.status == VoteStatus::kInvalid;
        failed += v.status == VoteStatus::kFailed;
      }
      out << canonical(Json{{"judge_id", spec.id},
                            {"votes", result.votes.size()},
                            {"skipped", run.tasks.size() - pending.size()},
                            {"invalid", invalid},
                            {"failed", failed}})
          << "\n";
      return 0;
    }
    if (aggregate->parsed()) {
      const auto id = need_run();
      const auto run = store.load_run(id);
      FilterPolicy filter = run.manifest.filter;
      if (min_elapsed) {
        if (*min_elapsed < 0) throw ValidationError("--min-elapsed must be >= 0");
        filter.min_elapsed_ms = *min_elapsed;
      }
      if (keep_not_familiar) filter.drop_not_familiar = false;
      if (keep_invalid) filter.drop_invalid = false;
      const auto aggregates = aggregate_records(run, filter);
      const auto reports = report_records(run, filter);
      store.write_aggregates(id, aggregates);
      store.write_reports(id, reports);
      const auto scores = std::count_if(aggregates.begin(), aggregates.end(), [](const Json& r) {
        return r.at("type") == "score";
      });
      out << canonical(Json{{"run_id", id},
                            {"aggregates", scores},
                            {"reports", reports.size()},
                            {"quarantined", run.quarantined},
                            {"duplicate_votes", run.duplicate_votes}})
          << "\n";
      return 0;
    }

    if (rep_rank->parsed() && !asr_matrix.empty()) {
      auto table = ranking_table_from_csv(read_text(asr_matrix));
      if (better == "higher") throw UsageError("--better higher applies to run rankings only");
      emit_table(out, table.render(), format);
      return 0;
    }
    if (rep_cot->parsed() && !run_list.empty()) {
      std::vector<CotRun> runs;
      for (const auto& r : run_list) {
        const auto data = store.load_run(r);
        const auto filter = effective_filter(data);
        auto judges = judge_filter.empty() ? judge_ids(data) : judge_filter;
        if (judges.size() != 1) throw UsageError("run " + r + " needs exactly one --judge");
        runs.push_back({data.judge(judges.front()) ? data.judge(judges.front())->cot_mode
                                                   : CotMode::kNone,
                        data.manifest.dataset_hash, run_outcomes(data, judges.front(), filter)});
      }
      emit_table(out, cot_comparison(runs).render(), format);
      return 0;
    }
    if (report->parsed()) {
      const auto run = store.load_run(need_run());
      const auto filter = effective_filter(run);
      const auto judges = judge_filter.empty() ? judge_ids(run) : judge_filter;
      for (const auto& j : judges) {
        if (run.judge(j) == nullptr) throw NotFoundError("judge " + j + " not in run");
      }
      if (rep_asr->parsed()) {
        emit_table(out, asr_table(run, judges, filter), format);
      } else if (rep_pos->parsed()) {
        std::vector<Vote> valid;
        for (const auto& j : judges) {
          for (auto& v : filter_votes(judge_votes(run, j), FilterPolicy{filter.min_elapsed_ms,
                                                                          false, true})) {
            valid.push_back(std::move(v));
          }
        }
        emit_table(out, positional_report(valid).render(), format);
      } else if (rep_verb->parsed()) {
        std::vector<std::size_t> bin_edges;
        if (edges.empty()) {
          bin_edges.assign(kDefaultVerbosityEdges.begin(), kDefaultVerbosityEdges.end());
        } else {
          for (int e : parse_ints(edges)) {
            if (e < 0) throw UsageError("bin edges must be >= 0");
            bin_edges.push_back(static_cast<std::size_t>(e));
          }
        }
        const SampleIndex index(run.samples);
        for (const auto& j : judges) {
          const auto valid = filter_votes(judge_votes(run, j), filter);
          auto curve = verbosity_curve(
              control_length_votes(run.tasks, valid, index, j,
                                   [](std::string_view s) { return word_count(s); }),
              bin_edges);
          curve.judge_id = j;
          if (format == "text") out << "Judge: " << j << " (length = word tokens)\n";
          emit_table(out, curve.render(), format);
        }
      } else if (rep_turn->parsed()) {
        const int km = k_max.value_or(run.manifest.votes_per_order);
        std::vector<int> ks = budgets.empty() ? std::vector<int>{} : parse_ints(budgets);
        if (ks.empty()) {
          for (int b : {1, 3, 5, 10, 20, 45}) {
            if (b < km) ks.push_back(b);
          }
          ks.push_back(km);
        }
        std::optional<Group> group;
        if (!group_name.empty()) group = parse_group(group_name);
        for (const auto& j : judges) {
          const auto valid = filter_votes(judge_votes(run, j), filter);
          const auto report_t = turnover(vote_streams(run.tasks, valid, j, group), km, ks);
          if (format == "text") out << "Judge: " << j << "\n";
          emit_table(out, report_t.render(), format);
        }
      } else if (rep_rank->parsed()) {
        if (better == "higher") throw UsageError("ASR rankings rank lower values first");
        emit_table(out, run_ranking(run, judges, filter).render(), format);
      } else if (rep_cot->parsed()) {
        std::vector<CotRun> runs;
        for (const auto& j : judges) {
          runs.push_back({run.judge(j)->cot_mode, run.manifest.dataset_hash,
                          run_outcomes(run, j, filter)});
        }
        emit_table(out, cot_comparison(runs).render(), format);
      }
      return 0;
    }

    if (attack_build->parsed()) {
      auto questions = read_staging<Question>(staging / "reviewed.ndjson", "review ingest");
      std::erase_if(questions, [](const Question& q) { return q.status != QuestionStatus::kVerified; });
      if (limit < 1) throw UsageError("--limit must be >= 1");
      if (questions.size() > static_cast<std::size_t>(limit)) questions.resize(limit);
      std::unique_ptr<ChatTransport> ta, tp;
      const auto anchor_ctx = make_ctx(resolve_generator(anchor, seed, config), ta);
      const auto perturb_ctx =
          make_ctx(resolve_generator(perturber.empty() ? anchor : perturber, seed, config), tp);
      AttackExperiment e;
      const auto rq = parse_research_question(rq_name);
      if (rq == ResearchQuestion::kRQ1) {
        auto deceptions = parse_kinds(kind_names);
        if (kind_names.empty()) {
          deceptions = {PerturbationKind::kFakeReference, PerturbationKind::kRichContent,
                        PerturbationKind::kCompound};
        }
        e = build_rq1(questions, anchor_ctx, perturb_ctx, parse_perturbation_kind(flaw_name),
                      deceptions);
      } else {
        std::vector<std::unique_ptr<ChatTransport>> holders(weak_names.size());
        std::vector<GenerationContext> weak;
        for (std::size_t i = 0; i < weak_names.size(); ++i) {
          weak.push_back(make_ctx(resolve_generator(weak_names[i], seed, config), holders[i]));
        }
        e = build_rq2(questions, anchor_ctx, weak, perturb_ctx);
      }
      e.random_baseline = !no_random;
      const auto dir = fs::path(out_dir) / "attacks" / name;
      fs::create_directories(dir);
      const Json records[] = {Json(e)};
      rewrite_ledger(dir / "experiment.ndjson", records);
      std::size_t weak_total = 0;
      for (const auto& w : e.weak_sets) weak_total += w.answers.size();
      out << canonical(Json{{"name", name},
                            {"rq", to_string(e.rq)},
                            {"anchors", e.anchors.size()},
                            {"weak", weak_total},
                            {"perturbed", e.perturbed.size()},
                            {"columns", e.columns.size()}})
          << "\n";
      return 0;
    }
    if (attack_run->parsed()) {
      const auto dir = fs::path(out_dir) / "attacks" / name;
      const auto load = read_ledger(dir / "experiment.ndjson");
      if (load.records.empty()) throw NotFoundError("attack experiment " + name + " not found");
      const auto e = load.records.front().get<AttackExperiment>();
      std::vector<JudgeSpec> judges;
      for (const auto& s : judge_specs) {
        judges.push_back(parse_judge(s, "", seed, CotMode::kNone, config));
      }
      JudgeRunOptions options;
      options.transport_factory = env.transport_factory;
      options.fan_out = fan_out;
      const auto result = run_attack(e, judges, k, seed, options);

      std::vector<Json> votes(result.votes.begin(), result.votes.end());
      rewrite_ledger(dir / "votes.ndjson", votes);
      const auto asr = result.asr_table();
      const auto share = result.weak_share_table();
      const auto ranking = result.ranking();
      std::ofstream(dir / "asr.csv") << asr.to_csv();
      std::ofstream(dir / "weak_share.csv") << share.to_csv();
      if (ranking) std::ofstream(dir / "ranking.csv") << ranking->render().to_csv();
      if (ranking) {
        emit_table(out, ranking->render(), format);
      } else {
        emit_table(out, asr, format);
      }
      if (format == "text") out << "\n";
      emit_table(out, share, format);
      return 0;
    }
    if (serve->parsed()) {
      ServiceOptions options;
      options.idle_expiry = std::chrono::minutes(idle_minutes);
      VotingService service(store, options);
      HttpOptions http;
      if (!static_dir.empty()) http.static_dir = static_dir;
      HttpFrontend frontend(service, http);
      const int bound = frontend.bind(host, port);
      out << canonical(Json{{"listening", fmt::format("http://{}:{}", host, bound)}}) << "\n";
      out.flush();
      g_serving = &frontend;
      std::signal(SIGINT, stop_serving);
      std::signal(SIGTERM, stop_serving);
      frontend.serve();
      g_serving = nullptr;
      return 0;
    }
    throw UsageError("no command given");
  } catch (const Error& e) {
    err << canonical(Json{{"error_class", e.error_class()}, {"message", e.what()}}) << "\n";
    return std::string_view(e.error_class()) == "UsageError" ? 2 : 1;
  } catch (const Json::exception& e) {
    err << canonical(Json{{"error_class", "ValidationError"}, {"message", e.what()}}) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << canonical(Json{{"error_class", "InternalError"}, {"message", e.what()}}) << "\n";
    return 1;
  }
}

}  // namespace judgeprobe
