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

// Prompt templates for question generation, raw answers, answer perturbation
// and pairwise evaluation. Rendering is pure: identical inputs always produce
// byte-identical text.

#include <string>
#include <string_view>

#include "judgeprobe/model.hpp"

namespace judgeprobe {

// Upper-case English count word ("THIRTY", "TWENTY-FIVE"). n in [1, 100].
std::string count_word(int n);

std::string render_question_prompt(BloomLevel level, int n);

// 50 words for Remembering, 100 for Understanding, 150 otherwise.
int word_limit_for(BloomLevel level);

// Requires a verified question.
std::string render_answer_prompt(const Question& question);

// Single-pass perturbation prompt for raw_2. Compound must be decomposed by the
// caller into FakeReference followed by RichContent.
std::string render_perturbation_prompt(PerturbationKind kind,
                                       const Question& question,
                                       const Answer& answer);

// Same template without the raw_2 precondition; used for chained passes and
// attack sets where the input is already perturbed.
std::string render_perturbation_text(PerturbationKind kind,
                                     std::string_view question_text,
                                     std::string_view answer_text);

struct EvalPrompt {
  std::string system;
  std::string user;
};

// `presented_first` fills the Answer1 slot.
EvalPrompt render_eval_prompt(std::string_view question_text,
                              std::string_view presented_first,
                              std::string_view presented_second,
                              CotMode cot_mode);

}  // namespace judgeprobe
