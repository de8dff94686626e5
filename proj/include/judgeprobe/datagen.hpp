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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "judgeprobe/chat_client.hpp"
#include "judgeprobe/codec.hpp"
#include "judgeprobe/model.hpp"

namespace judgeprobe {

struct GeneratorConfig {
  std::string id;  // recorded as Answer::generator; defaults to endpoint.model
  EndpointConfig endpoint;
  // Offline deterministic generator instead of the endpoint.
  bool stub = false;
  std::uint64_t stub_seed = 0;
  double question_temperature = 1.0;
  double answer_temperature = 1.0;
  double perturb_temperature = 0.7;

  const std::string& generator_id() const { return id.empty() ? endpoint.model : id; }
  bool operator==(const GeneratorConfig&) const = default;
};

void to_json(Json& j, const GeneratorConfig& v);
void from_json(const Json& j, GeneratorConfig& v);

// Offline chat model that follows the generation prompts well enough for
// dry runs: question prompts get a JSON object, perturbation prompts get the
// fenced formats they ask for. Output is a pure function of
// (model, seed, request key, prompt).
class StubChatTransport final : public ChatTransport {
 public:
  StubChatTransport(std::string model, std::uint64_t seed);
  std::string send(const ChatRequest& request) override;

 private:
  std::string model_;
  std::uint64_t seed_;
};

std::unique_ptr<ChatTransport> make_generator_transport(const GeneratorConfig& config,
                                                        const TransportFactory& factory);

// Questions from a question-prompt response: a JSON object keyed by level
// name (optionally inside a ```json fence). Throws ParseError.
std::vector<std::string> parse_question_response(BloomLevel level, std::string_view raw);

struct StructuredPerturbation {
  std::string text;
  std::vector<std::string> changes;
};

// FactualError: ```error list + final ```answer block. GenderBias: ```points
// list + final ```answer block. Throws ParseError carrying the raw response.
StructuredPerturbation parse_structured_perturbation(PerturbationKind kind,
                                                     std::string_view raw);

// Ref/RC guardrail: the original's words must survive, in order, in the
// perturbed text once emphasis marks and whitespace are ignored.
bool preserves_semantics(std::string_view original, std::string_view perturbed);

struct GenerationFailure {
  std::string key;
  std::string error_class;
  std::string message;
  std::string raw_response;
};

void to_json(Json& j, const GenerationFailure& v);

template <typename T>
struct Generated {
  std::vector<T> items;
  std::vector<GenerationFailure> failures;
};

struct GenerationContext {
  ChatTransport* transport = nullptr;
  GeneratorConfig config;
  std::uint64_t seed = 0;
  int fan_out = 0;  // 0 → endpoint.fan_out
  Sleeper sleep;
};

// Draft questions; duplicates (same text) are dropped.
Generated<Question> generate_questions(const GenerationContext& ctx,
                                       std::span<const BloomLevel> levels, int per_level);

// Two raw answers per verified question. A per-question coin flip, derived
// from (seed, question id), picks which generation becomes raw_2 (the
// perturbation target); it is reused for every perturbation kind.
Generated<Answer> generate_raw_answers(const GenerationContext& ctx,
                                       std::span<const Question> questions);

// One plain answer per question, variant raw_1; used for attack anchor and
// weak sets.
Generated<Answer> generate_single_answers(const GenerationContext& ctx,
                                          std::span<const Question> questions,
                                          AnswerVariant variant, int generation_index,
                                          std::string_view key_salt);

// Applies `kind` to each target answer. Compound runs FakeReference, then
// RichContent over its output. Semantic-agnostic outputs failing
// preserves_semantics are flagged, not rejected.
Generated<Answer> perturb_answers(const GenerationContext& ctx,
                                  std::span<const Question> questions,
                                  std::span<const Answer> targets,
                                  std::span<const PerturbationKind> kinds);

// Same as perturb_answers without the raw_2 filter; attack weak sets are
// perturbed answers themselves.
Generated<Answer> perturb_targets(const GenerationContext& ctx,
                                  std::span<const Question> questions,
                                  std::span<const Answer> targets,
                                  std::span<const PerturbationKind> kinds);

// Comma-separated with header question_id,verdict,level,note. Quoted fields
// may contain commas.
std::vector<ReviewDecision> read_review_csv(std::string_view text);

// Rejected questions are removed, reclassified ones relabeled, and every
// question with a keep/reclassify decision becomes verified. Questions without
// a decision stay draft.
std::vector<Question> ingest_review(std::span<const ReviewDecision> decisions,
                                    std::span<const Question> questions);

// One Sample per (verified question, kind). Throws AssemblyError listing
// every gap, or any validate_sample violation.
std::vector<Sample> assemble_dataset(std::span<const Question> questions,
                                     std::span<const Answer> answers,
                                     std::span<const PerturbationKind> kinds);

}  // namespace judgeprobe
