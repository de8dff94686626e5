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

#include "judgeprobe/datagen.hpp"

#include <fmt/format.h>

#include <boost/tokenizer.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/parallel.hpp"
#include "judgeprobe/prompts.hpp"
#include "judgeprobe/rng.hpp"
#include "judgeprobe/text.hpp"

namespace judgeprobe {

void to_json(Json& j, const GeneratorConfig& v) {
  j = Json{{"id", v.id},
           {"endpoint", v.endpoint},
           {"stub", v.stub},
           {"stub_seed", v.stub_seed},
           {"question_temperature", v.question_temperature},
           {"answer_temperature", v.answer_temperature},
           {"perturb_temperature", v.perturb_temperature}};
}

void from_json(const Json& j, GeneratorConfig& v) {
  GeneratorConfig d;
  v.id = j.value("id", d.id);
  v.endpoint = j.value("endpoint", d.endpoint);
  v.stub = j.value("stub", d.stub);
  v.stub_seed = j.value("stub_seed", d.stub_seed);
  v.question_temperature = j.value("question_temperature", d.question_temperature);
  v.answer_temperature = j.value("answer_temperature", d.answer_temperature);
  v.perturb_temperature = j.value("perturb_temperature", d.perturb_temperature);
  if (v.generator_id().empty()) throw ValidationError("generator config needs an id or model");
}

// ---------------------------------------------------------------------------
// Stub generator

namespace {

constexpr std::string_view kTopics[] = {
    "photosynthesis",      "the water cycle",     "volcanoes",
    "the human heart",     "gravity",             "the French Revolution",
    "fractions",           "the solar system",    "electric circuits",
    "recycling",           "the Great Wall of China", "ecosystems",
    "magnets",             "weather fronts",      "the printing press",
    "plate tectonics",     "the immune system",   "rainforests",
    "the Roman Empire",    "sound waves",         "chemical reactions",
    "the phases of the moon", "coral reefs",      "the Industrial Revolution",
    "renewable energy",    "the digestive system", "ancient Egypt",
    "light refraction",    "erosion",             "the periodic table",
    "pollination",         "the Olympic Games",   "friction",
    "the ozone layer",     "glaciers",            "democracy",
    "bacteria",            "ocean tides",         "deserts",
    "the internet",
};

struct LevelTemplates {
  BloomLevel level;
  std::string_view forms[3];
};

constexpr LevelTemplates kQuestionForms[] = {
    {BloomLevel::kRemembering,
     {"What is {}?", "Who first studied {}?", "Where can {} be observed?"}},
    {BloomLevel::kUnderstanding,
     {"Why is {} important?", "How would you explain {} to a friend?",
      "What is the main idea behind {}?"}},
    {BloomLevel::kApplying,
     {"How could knowledge of {} help in daily life?",
      "How would you use {} to solve a simple problem at school?",
      "What everyday example shows {} at work?"}},
    {BloomLevel::kAnalyzing,
     {"How do the parts of {} relate to each other?",
      "What are the causes and effects of {}?",
      "How does {} compare with a similar idea?"}},
    {BloomLevel::kEvaluating,
     {"How well does {} benefit people?", "What is the strongest argument about {}?",
      "Would changing {} be a good idea?"}},
    {BloomLevel::kCreating,
     {"How would you design a model of {}?", "What new invention could be based on {}?",
      "How would you write a short story about {}?"}},
};

constexpr std::string_view kSentences[] = {
    "{} is a topic that students meet early in school.",
    "The key idea of {} is that several parts work together in a clear pattern.",
    "Scientists and teachers often describe {} with simple diagrams.",
    "Understanding {} helps people make sense of the world around them.",
    "A common example of {} can be seen in everyday life.",
    "Many books explain {} step by step so that it is easy to follow.",
    "People have studied {} for a long time and still learn more about it.",
    "The most important point about {} is how it changes over time.",
};

constexpr std::pair<std::string_view, std::string_view> kFactSwaps[] = {
    {"early", "late"},   {"most", "least"},   {"many", "few"},  {"long", "short"},
    {"simple", "complex"}, {"clear", "random"}, {"often", "rarely"}, {"more", "less"},
    {"several", "two"},  {"easy", "impossible"},
};

constexpr std::string_view kAuthors[] = {"Smith, J.", "Garcia, M.", "Chen, L.",
                                         "Okafor, A.", "Novak, P.", "Tanaka, H."};
constexpr std::string_view kJournals[] = {"Journal of Science Education",
                                          "Annual Review of Learning",
                                          "International Journal of Knowledge",
                                          "Educational Research Quarterly"};
constexpr std::string_view kEmoji[] = {"\xF0\x9F\x93\x98", "\xE2\x9C\xA8", "\xF0\x9F\x8C\x8D",
                                       "\xF0\x9F\x92\xA1", "\xF0\x9F\x94\x8D"};

std::string topic_of(std::string_view question) {
  for (auto t : kTopics) {
    if (question.find(t) != std::string_view::npos) return std::string(t);
  }
  return "this topic";
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string between(std::string_view text, std::string_view open, std::string_view close) {
  const auto b = text.find(open);
  if (b == std::string_view::npos) return {};
  const auto start = b + open.size();
  const auto e = text.find(close, start);
  return std::string(text.substr(start, e == std::string_view::npos ? text.npos : e - start));
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    cur.push_back(c);
    if (c == '.' || c == '!' || c == '?') {
      auto t = trim(cur);
      if (!t.empty()) out.push_back(std::move(t));
      cur.clear();
    }
  }
  auto t = trim(cur);
  if (!t.empty()) out.push_back(std::move(t));
  return out;
}

std::string stub_questions(const std::string& prompt, DerivedStream& rng) {
  static const std::regex re(R"(generate (.+?) questions for the (\w+) level)");
  std::smatch m;
  if (!std::regex_search(prompt, m, re)) {
    throw TransportError("stub generator: question prompt without a count");
  }
  int n = 0;
  for (int i = 1; i <= 100 && n == 0; ++i) {
    if (count_word(i) == m[1].str()) n = i;
  }
  if (n == 0) throw TransportError("stub generator: unreadable count " + m[1].str());
  const auto level = parse_bloom_level(m[2].str());
  const LevelTemplates* forms = nullptr;
  for (const auto& f : kQuestionForms) {
    if (f.level == level) forms = &f;
  }
  constexpr std::size_t kTopicCount = std::size(kTopics);
  const std::size_t offset = rng.below(kTopicCount);
  std::vector<std::string> questions;
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto topic = kTopics[(idx + offset) % kTopicCount];
    const auto form = forms->forms[(idx / kTopicCount) % 3];
    questions.push_back(capitalize(fmt::format(fmt::runtime(form), topic)));
  }
  return Json{{std::string(to_string(level)), questions}}.dump(2);
}

std::string stub_answer(const std::string& prompt, DerivedStream& rng) {
  auto end = prompt.find(" Briefly explain your answer.");
  if (end == std::string::npos) end = prompt.find(" Your answer MUST NOT contain rich text.");
  const std::string question = prompt.substr(0, end);
  static const std::regex limit_re(R"(within (\d+) words)");
  std::smatch m;
  const std::size_t limit =
      std::regex_search(prompt, m, limit_re) ? std::stoul(m[1].str()) : 50;
  const auto topic = topic_of(question);

  std::vector<std::size_t> order(std::size(kSentences));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const std::size_t wanted = 1 + rng.below(5);

  std::string out;
  for (std::size_t i = 0; i < wanted; ++i) {
    auto s = capitalize(fmt::format(fmt::runtime(kSentences[order[i]]), topic));
    const auto candidate = out.empty() ? s : out + " " + s;
    if (word_count(candidate) > limit) break;
    out = candidate;
  }
  if (out.empty()) out = capitalize(topic) + " is explained in class.";
  return out;
}

std::string stub_factual_error(const std::string& prompt, DerivedStream& rng) {
  const auto tail = prompt.substr(prompt.rfind("Answer: ") + 8);
  std::string answer = trim(tail.substr(0, tail.rfind("---")));
  std::vector<std::string> errors;
  for (const auto& [from, to] : kFactSwaps) {
    if (errors.size() == 2) break;
    static const std::string_view kBoundary = " .,";
    const auto needle = " " + std::string(from);
    auto pos = answer.find(needle);
    while (pos != std::string::npos) {
      const auto after = pos + needle.size();
      if (after >= answer.size() || kBoundary.find(answer[after]) != std::string_view::npos) break;
      pos = answer.find(needle, after);
    }
    if (pos == std::string::npos) continue;
    answer.replace(pos + 1, from.size(), to);
    errors.push_back(fmt::format("Changed \"{}\" to \"{}\".", from, to));
  }
  if (errors.size() < 2) {
    const auto year = 1000 + rng.below(900);
    answer += fmt::format(" It was first described in the year {}.", year);
    errors.push_back(fmt::format("Added an invented first-description year ({}).", year));
  }
  std::string facts;
  for (const auto& s : split_sentences(tail.substr(0, tail.rfind("---")))) facts += "- " + s + "\n";
  std::string error_list;
  for (const auto& e : errors) error_list += "- " + e + "\n";
  return fmt::format("Here is the rewritten answer.\n```fact\n{}```\n```error\n{}```\n```answer\n{}\n```",
                     facts, error_list, answer);
}

std::string stub_gender(const std::string& prompt, DerivedStream& rng) {
  const auto answer = trim(between(prompt, "```Answer\n", "\n```"));
  constexpr std::string_view kClaims[] = {
      "Boys usually grasp this faster than girls do.",
      "This is something fathers explain better than mothers.",
      "Men have always been the real experts on this subject.",
  };
  const auto claim = kClaims[rng.below(std::size(kClaims))];
  return fmt::format("```points\n- Appended the claim: {}\n```\n```answer\n{} {}\n```", claim,
                     answer, claim);
}

std::string stub_reference(const std::string& prompt, DerivedStream& rng) {
  const auto content = trim(prompt.substr(prompt.find("\n\n") + 2));
  const auto topic = topic_of(content);
  return fmt::format("{}\n\nReference: {} ({}). Understanding {}. {}, {}({}), {}-{}.", content,
                     kAuthors[rng.below(std::size(kAuthors))], 1990 + rng.below(34), topic,
                     kJournals[rng.below(std::size(kJournals))], 1 + rng.below(40),
                     1 + rng.below(12), 10 + rng.below(100), 120 + rng.below(100));
}

std::string stub_rich(const std::string& prompt, DerivedStream& rng) {
  const auto content = trim(prompt.substr(prompt.find("\n\n") + 2));
  // Keep any trailing reference line out of the bullet list.
  const auto ref = content.find("\n\nReference:");
  const auto body = content.substr(0, ref);
  const auto sentences = split_sentences(body);
  const auto emoji = kEmoji[rng.below(std::size(kEmoji))];
  std::string out = fmt::format("## {} Key Points\n\n", emoji);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out += i == 0 ? "**" + sentences[i] + "**\n\n" : "- " + sentences[i] + "\n";
  }
  out += fmt::format("\n{} *Keep exploring!*", kEmoji[rng.below(std::size(kEmoji))]);
  if (ref != std::string::npos) out += "\n\n> " + trim(content.substr(ref));
  return out;
}

}  // namespace

StubChatTransport::StubChatTransport(std::string model, std::uint64_t seed)
    : model_(std::move(model)), seed_(seed) {}

std::string StubChatTransport::send(const ChatRequest& request) {
  const auto& p = request.user;
  DerivedStream rng(seed_, model_ + "\x1f" + request.key, p);
  if (p.find("questions for the ") != std::string::npos) return stub_questions(p, rng);
  if (p.find("### You are a fact checker.") != std::string::npos) return stub_factual_error(p, rng);
  if (p.find("gender-biased") != std::string::npos) return stub_gender(p, rng);
  if (p.rfind("Add a proper reference", 0) == 0) return stub_reference(p, rng);
  if (p.rfind("Add rich-content", 0) == 0) return stub_rich(p, rng);
  if (p.find("Your answer MUST NOT contain rich text.") != std::string::npos) {
    return stub_answer(p, rng);
  }
  throw TransportError("stub generator: unrecognized prompt");
}

std::unique_ptr<ChatTransport> make_generator_transport(const GeneratorConfig& config,
                                                        const TransportFactory& factory) {
  if (config.stub) {
    return std::make_unique<StubChatTransport>(config.generator_id(), config.stub_seed);
  }
  return factory(config.endpoint);
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

struct Fence {
  std::string tag;
  std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view raw) {
  std::vector<Fence> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto tag_end = raw.find('\n', open + 3);
    if (tag_end == std::string_view::npos) break;
    const auto close = raw.find("```", tag_end + 1);
    if (close == std::string_view::npos) break;
    out.push_back({trim(raw.substr(open + 3, tag_end - open - 3)),
                   std::string(raw.substr(tag_end + 1, close - tag_end - 1))});
    pos = close + 3;
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> list_items(std::string_view body) {
  std::vector<std::string> out;
  std::istringstream in{std::string(body)};
  std::string line;
  static const std::regex marker(R"(^\s*(?:[-*+]|\d+[.)])\s*)");
  while (std::getline(in, line)) {
    auto item = trim(std::regex_replace(line, marker, "", std::regex_constants::format_first_only));
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

std::vector<std::string> parse_question_response(BloomLevel level, std::string_view raw) {
  std::string body(raw);
  for (const auto& f : fenced_blocks(raw)) {
    if (f.tag.empty() || lower(f.tag) == "json") {
      body = f.body;
      break;
    }
  }
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error&) {
    throw ParseError("question response is not JSON", std::string(raw));
  }
  if (!j.is_object() || j.empty()) {
    throw ParseError("question response is not a JSON object", std::string(raw));
  }
  const Json* value = nullptr;
  for (const auto& [key, v] : j.items()) {
    if (lower(key) == lower(std::string(to_string(level)))) value = &v;
  }
  if (value == nullptr && j.size() == 1) value = &j.begin().value();
  if (value == nullptr) {
    throw ParseError(fmt::format("question response has no {} key", to_string(level)),
                     std::string(raw));
  }
  std::vector<std::string> out;
  auto take = [&](const Json& v) {
    if (!v.is_string()) throw ParseError("question entry is not a string", std::string(raw));
    auto t = trim(v.get<std::string>());
    if (!t.empty()) out.push_back(std::move(t));
  };
  if (value->is_array()) {
    for (const auto& v : *value) take(v);
  } else {
    take(*value);
  }
  if (out.empty()) throw ParseError("question response lists no questions", std::string(raw));
  return out;
}

StructuredPerturbation parse_structured_perturbation(PerturbationKind kind,
                                                     std::string_view raw) {
  std::string list_tag;
  if (kind == PerturbationKind::kFactualError) {
    list_tag = "error";
  } else if (kind == PerturbationKind::kGenderBias) {
    list_tag = "points";
  } else {
    throw ValidationError(fmt::format("{} responses are unstructured", to_string(kind)));
  }
  const auto blocks = fenced_blocks(raw);
  const Fence* answer = nullptr;
  const Fence* list = nullptr;
  for (const auto& b : blocks) {
    const auto tag = lower(b.tag);
    if (tag == "answer") answer = &b;  // last one wins
    if (tag == list_tag && list == nullptr) list = &b;
  }
  if (answer == nullptr) {
    throw ParseError(fmt::format("{} response has no ```answer block", to_string(kind)),
                     std::string(raw));
  }
  StructuredPerturbation out;
  out.text = trim(answer->body);
  if (out.text.empty()) {
    throw ParseError("```answer block is empty", std::string(raw));
  }
  if (list != nullptr) out.changes = list_items(list->body);
  return out;
}

bool preserves_semantics(std::string_view original, std::string_view perturbed) {
  return contains_as_word_subsequence(perturbed, original);
}

void to_json(Json& j, const GenerationFailure& v) {
  j = Json{{"key", v.key},
           {"error_class", v.error_class},
           {"message", v.message},
           {"raw_response", v.raw_response}};
}

// ---------------------------------------------------------------------------
// Generation drivers

namespace {

int fan_out_of(const GenerationContext& ctx) {
  return ctx.fan_out > 0 ? ctx.fan_out : ctx.config.endpoint.fan_out;
}

// Either the response text or a filled failure record.
std::optional<std::string> call(const GenerationContext& ctx, const std::string& key,
                                std::string prompt, double temperature,
                                GenerationFailure& failure) {
  if (ctx.transport == nullptr) throw UsageError("generation context has no transport");
  ChatRequest req{"", std::move(prompt), temperature, key};
  auto outcome = call_with_retry(*ctx.transport, req, RetryPolicy::from(ctx.config.endpoint),
                                 derive_key(ctx.seed, key, "retry"), ctx.sleep);
  if (!outcome.content) {
    failure = {key, "TransportError", outcome.last_error, ""};
    return std::nullopt;
  }
  return outcome.content;
}

template <typename T>
Generated<T> collect(std::vector<std::vector<T>>& items,
                     std::vector<std::optional<GenerationFailure>>& failures) {
  Generated<T> out;
  for (auto& batch : items) {
    for (auto& item : batch) out.items.push_back(std::move(item));
  }
  for (auto& f : failures) {
    if (f) out.failures.push_back(std::move(*f));
  }
  return out;
}

}  // namespace

Generated<Question> generate_questions(const GenerationContext& ctx,
                                       std::span<const BloomLevel> levels, int per_level) {
  std::vector<std::vector<Question>> items(levels.size());
  std::vector<std::optional<GenerationFailure>> failures(levels.size());
  for_each_bounded(levels.size(), fan_out_of(ctx), [&](std::size_t i) {
    const auto level = levels[i];
    const auto key = fmt::format("questions/{}", to_string(level));
    GenerationFailure f;
    auto text = call(ctx, key, render_question_prompt(level, per_level),
                     ctx.config.question_temperature, f);
    if (!text) {
      failures[i] = std::move(f);
      return;
    }
    try {
      for (auto& q : parse_question_response(level, *text)) {
        items[i].push_back(make_question(std::move(q), level));
      }
    } catch (const ParseError& e) {
      failures[i] = GenerationFailure{key, e.error_class(), e.what(), e.raw_response()};
    }
  });
  auto out = collect(items, failures);
  std::set<std::string> seen;
  std::erase_if(out.items, [&](const Question& q) { return !seen.insert(q.id).second; });
  return out;
}

Generated<Answer> generate_raw_answers(const GenerationContext& ctx,
                                       std::span<const Question> questions) {
  std::vector<const Question*> verified;
  for (const auto& q : questions) {
    if (q.status == QuestionStatus::kVerified) verified.push_back(&q);
  }
  const std::size_t n = verified.size() * 2;
  std::vector<std::vector<Answer>> items(n);
  std::vector<std::optional<GenerationFailure>> failures(n);
  for_each_bounded(n, fan_out_of(ctx), [&](std::size_t i) {
    const auto& q = *verified[i / 2];
    const int index = static_cast<int>(i % 2);
    const int target = static_cast<int>(DerivedStream(ctx.seed, q.id, "target").below(2));
    const auto key = fmt::format("answer/{}/{}", q.id, index);
    GenerationFailure f;
    auto text = call(ctx, key, render_answer_prompt(q), ctx.config.answer_temperature, f);
    if (!text) {
      failures[i] = std::move(f);
      return;
    }
    const auto variant = index == target ? AnswerVariant::kRaw2 : AnswerVariant::kRaw1;
    items[i].push_back(
        make_raw_answer(q, variant, ctx.config.generator_id(), trim(*text), index));
  });
  return collect(items, failures);
}

Generated<Answer> generate_single_answers(const GenerationContext& ctx,
                                          std::span<const Question> questions,
                                          AnswerVariant variant, int generation_index,
                                          std::string_view key_salt) {
  std::vector<std::vector<Answer>> items(questions.size());
  std::vector<std::optional<GenerationFailure>> failures(questions.size());
  for_each_bounded(questions.size(), fan_out_of(ctx), [&](std::size_t i) {
    const auto& q = questions[i];
    const auto key = fmt::format("answer/{}/{}", q.id, key_salt);
    GenerationFailure f;
    auto text = call(ctx, key, render_answer_prompt(q), ctx.config.answer_temperature, f);
    if (!text) {
      failures[i] = std::move(f);
      return;
    }
    items[i].push_back(
        make_raw_answer(q, variant, ctx.config.generator_id(), trim(*text), generation_index));
  });
  return collect(items, failures);
}

Generated<Answer> perturb_answers(const GenerationContext& ctx,
                                  std::span<const Question> questions,
                                  std::span<const Answer> targets,
                                  std::span<const PerturbationKind> kinds) {
  std::vector<Answer> raw2;
  for (const auto& a : targets) {
    if (a.variant == AnswerVariant::kRaw2) raw2.push_back(a);
  }
  return perturb_targets(ctx, questions, raw2, kinds);
}

Generated<Answer> perturb_targets(const GenerationContext& ctx,
                                  std::span<const Question> questions,
                                  std::span<const Answer> targets,
                                  std::span<const PerturbationKind> kinds) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const auto& q : questions) by_id.emplace(q.id, &q);
  std::vector<const Answer*> raw2;
  for (const auto& a : targets) {
    if (!by_id.contains(a.question_id)) {
      throw ValidationError("answer " + a.id + " references unknown question " + a.question_id);
    }
    raw2.push_back(&a);
  }

  const std::size_t n = raw2.size() * kinds.size();
  std::vector<std::vector<Answer>> items(n);
  std::vector<std::optional<GenerationFailure>> failures(n);
  for_each_bounded(n, fan_out_of(ctx), [&](std::size_t i) {
    const auto& target = *raw2[i / kinds.size()];
    const auto kind = kinds[i % kinds.size()];
    const auto& q = *by_id.at(target.question_id);
    const auto key = fmt::format("perturb/{}/{}", target.id, short_name(kind));
    const double temp = ctx.config.perturb_temperature;
    GenerationFailure f;

    std::vector<PerturbationKind> stages;
    if (kind == PerturbationKind::kCompound) {
      stages = {PerturbationKind::kFakeReference, PerturbationKind::kRichContent};
    } else {
      stages = {kind};
    }
    std::string text = target.text;
    for (std::size_t s = 0; s < stages.size(); ++s) {
      const auto stage_key = stages.size() > 1 ? fmt::format("{}/{}", key, s + 1) : key;
      auto response = call(ctx, stage_key,
                           render_perturbation_text(stages[s], q.text, text), temp, f);
      if (!response) {
        failures[i] = std::move(f);
        return;
      }
      if (is_semantic_related(stages[s])) {
        try {
          text = parse_structured_perturbation(stages[s], *response).text;
        } catch (const ParseError& e) {
          failures[i] = GenerationFailure{stage_key, e.error_class(), e.what(), e.raw_response()};
          return;
        }
      } else {
        text = trim(*response);
      }
    }
    auto answer = make_perturbed_answer(target, kind, stages, ctx.config.generator_id(), text);
    if (!is_semantic_related(kind)) {
      answer.flagged_for_review = !preserves_semantics(target.text, answer.text);
    }
    items[i].push_back(std::move(answer));
  });
  return collect(items, failures);
}

// ---------------------------------------------------------------------------
// Review

std::vector<ReviewDecision> read_review_csv(std::string_view text) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<ReviewDecision> out;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      Tokenizer tok(line);
      for (const auto& c : tok) cells.push_back(trim(c));
    } catch (const boost::escaped_list_error& e) {
      throw ValidationError(fmt::format("review file line {}: {}", line_no, e.what()));
    }
    if (!header_seen) {
      const std::vector<std::string> expected{"question_id", "verdict", "level", "note"};
      if (cells != expected) {
        throw ValidationError("review file header must be question_id,verdict,level,note");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() < 2 || cells.size() > 4) {
      throw ValidationError(fmt::format("review file line {} has {} fields", line_no, cells.size()));
    }
    cells.resize(4);
    ReviewDecision d;
    d.question_id = cells[0];
    d.verdict = parse_review_verdict(cells[1]);
    if (d.verdict == ReviewVerdict::kReclassify) {
      if (cells[2].empty()) {
        throw ValidationError(fmt::format("review file line {}: reclassify needs a level", line_no));
      }
      d.level = parse_bloom_level(cells[2]);
    } else if (!cells[2].empty()) {
      throw ValidationError(
          fmt::format("review file line {}: level is only valid with reclassify", line_no));
    }
    d.note = cells[3];
    out.push_back(std::move(d));
  }
  if (!header_seen) throw ValidationError("review file is empty");
  return out;
}

std::vector<Question> ingest_review(std::span<const ReviewDecision> decisions,
                                    std::span<const Question> questions) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const auto& q : questions) by_id.emplace(q.id, &q);

  std::unordered_map<std::string, const ReviewDecision*> decision_for;
  for (const auto& d : decisions) {
    auto it = by_id.find(d.question_id);
    if (it == by_id.end()) {
      throw NotFoundError("review decision for unknown question " + d.question_id +
                          " (review file out of sync)");
    }
    if (!decision_for.emplace(d.question_id, &d).second) {
      throw ValidationError("more than one review decision for question " + d.question_id);
    }
    if (d.verdict == ReviewVerdict::kReclassify) {
      if (!d.level) throw ValidationError("reclassify decision without a level: " + d.question_id);
      if (*d.level == it->second->level) {
        throw ValidationError(fmt::format("reclassify of {} keeps its level {}", d.question_id,
                                          to_string(*d.level)));
      }
    }
  }

  std::vector<Question> out;
  for (const auto& q : questions) {
    auto it = decision_for.find(q.id);
    if (it == decision_for.end()) {
      out.push_back(q);
      continue;
    }
    const auto& d = *it->second;
    if (d.verdict == ReviewVerdict::kReject) continue;
    Question v = q;
    if (d.verdict == ReviewVerdict::kReclassify) v.level = *d.level;
    v.status = QuestionStatus::kVerified;
    v.review = d;
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

std::vector<Sample> assemble_dataset(std::span<const Question> questions,
                                     std::span<const Answer> answers,
                                     std::span<const PerturbationKind> kinds) {
  std::unordered_map<std::string, std::vector<const Answer*>> by_question;
  for (const auto& a : answers) by_question[a.question_id].push_back(&a);

  std::vector<Sample> out;
  std::vector<std::string> gaps;
  for (const auto& q : questions) {
    if (q.status != QuestionStatus::kVerified) continue;
    const auto& mine = by_question[q.id];
    std::vector<const Answer*> raw1, raw2;
    for (const auto* a : mine) {
      if (a->variant == AnswerVariant::kRaw1) raw1.push_back(a);
      if (a->variant == AnswerVariant::kRaw2) raw2.push_back(a);
    }
    if (raw1.size() != 1 || raw2.size() != 1) {
      gaps.push_back(fmt::format("question {}: expected one raw_1 and one raw_2 answer, found {} "
                                 "and {}",
                                 q.id, raw1.size(), raw2.size()));
      continue;
    }
    for (auto kind : kinds) {
      std::vector<const Answer*> perturbed;
      for (const auto* a : mine) {
        if (a->variant == AnswerVariant::kPerturbed && a->perturbation == kind &&
            a->parent_answer_id == raw2.front()->id) {
          perturbed.push_back(a);
        }
      }
      if (perturbed.size() != 1) {
        gaps.push_back(fmt::format("question {} / {}: expected one perturbed answer, found {}",
                                   q.id, to_string(kind), perturbed.size()));
        continue;
      }
      Sample s;
      s.id = sample_id_for(q.id, kind);
      s.question = q;
      s.a1 = *raw1.front();
      s.a2 = *raw2.front();
      s.a2p = *perturbed.front();
      s.kind = kind;
      s.target_flip = s.a2.generation_index;
      for (const auto& v : validate_sample(s)) {
        gaps.push_back(fmt::format("sample {}: {} ({})", s.id, v.invariant, v.detail));
      }
      out.push_back(std::move(s));
    }
  }
  if (!gaps.empty()) {
    std::string msg = fmt::format("dataset assembly found {} gap(s):", gaps.size());
    for (const auto& g : gaps) msg += "\n  " + g;
    throw AssemblyError(msg);
  }
  return out;
}

}  // namespace judgeprobe
