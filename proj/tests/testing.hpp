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

// Synthetic samples and small helpers shared by the test binaries.

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "judgeprobe/codec.hpp"
#include "judgeprobe/model.hpp"

namespace judgeprobe::testing {

inline Question verified_question(const std::string& text,
                                  BloomLevel level = BloomLevel::kRemembering) {
  Question q = make_question(text, level);
  q.status = QuestionStatus::kVerified;
  q.review = ReviewDecision{q.id, ReviewVerdict::kKeep, std::nullopt, ""};
  return q;
}

// A valid sample for question number `i`. The raw answers differ in length so
// length-driven judges have something to go on.
inline Sample synthetic_sample(int i, PerturbationKind kind,
                               const std::string& extra_words = "") {
  const Question q = verified_question("Synthetic question " + std::to_string(i) + "?");
  Answer a1 = make_raw_answer(q, AnswerVariant::kRaw1, "gen",
                              "First answer to question " + std::to_string(i) + ".", 0);
  Answer a2 = make_raw_answer(q, AnswerVariant::kRaw2, "gen",
                              "Second answer to question " + std::to_string(i) +
                                  " with a few more words." + extra_words,
                              1);
  std::vector<PerturbationKind> stages{kind};
  if (kind == PerturbationKind::kCompound) {
    stages = {PerturbationKind::kFakeReference, PerturbationKind::kRichContent};
  }
  Answer a2p = make_perturbed_answer(a2, kind, stages, "gen", a2.text + " [perturbed]");
  Sample s;
  s.id = sample_id_for(q.id, kind);
  s.question = q;
  s.a1 = a1;
  s.a2 = a2;
  s.a2p = a2p;
  s.kind = kind;
  s.target_flip = 1;
  return s;
}

inline std::vector<Sample> synthetic_samples(int n, PerturbationKind kind) {
  std::vector<Sample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(synthetic_sample(i, kind));
  return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("judgeprobe-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace judgeprobe::testing
