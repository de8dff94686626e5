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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "judgeprobe/aggregation.hpp"
#include "judgeprobe/codec.hpp"
#include "judgeprobe/judge_spec.hpp"
#include "judgeprobe/model.hpp"

namespace judgeprobe {

inline constexpr const char* kToolVersion = "0.1.0";

// One newline-delimited segment as read from disk. A trailing line without
// its newline is the footprint of an interrupted append; it is reported in
// `quarantined` and never parsed.
struct LedgerLoad {
  std::vector<Json> records;
  std::vector<std::uint64_t> positions;  // byte offset of each record
  std::vector<std::string> quarantined;
};

// Missing file → empty load. A malformed complete line is corruption, not a
// crash artifact, and raises IntegrityError naming the segment and line.
LedgerLoad read_ledger(const std::filesystem::path& path);

// Exclusive appender for one segment. Holds an flock on "<segment>.lock" for
// its lifetime, so a second writer (in any process) fails fast. On open, a
// partial trailing line is moved to "<segment>.quarantine" and cut off.
class LedgerWriter {
 public:
  explicit LedgerWriter(std::filesystem::path path);
  ~LedgerWriter();
  LedgerWriter(const LedgerWriter&) = delete;
  LedgerWriter& operator=(const LedgerWriter&) = delete;

  std::uint64_t append(const Json& record);
  const std::filesystem::path& path() const { return path_; }
  // Bytes moved to the quarantine file when the writer opened.
  std::uint64_t repaired_bytes() const { return repaired_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  int lock_fd_ = -1;
  std::uint64_t end_ = 0;
  std::uint64_t repaired_ = 0;
};

// Replaces a derived segment wholesale (write temp, fsync, rename) under the
// segment lock.
void rewrite_ledger(const std::filesystem::path& path, std::span<const Json> records);

// RFC 3339 UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible output.
std::string creation_timestamp();

struct RunManifest {
  std::string run_id;
  std::string dataset_hash;
  std::vector<JudgeSpec> judges;
  std::uint64_t seed = 0;
  int votes_per_order = 3;
  std::vector<Group> groups{Group::kControl, Group::kExperimental};
  FilterPolicy filter;
  std::vector<CotMode> cot_modes;
  std::string created_at;
  std::string tool_version = kToolVersion;

  bool operator==(const RunManifest&) const = default;
};

void to_json(Json& j, const RunManifest& v);
void from_json(const Json& j, RunManifest& v);

struct RunData {
  RunManifest manifest;
  std::vector<Sample> samples;
  std::vector<ComparisonTask> tasks;  // schedule order
  std::vector<Vote> votes;            // ledger order, deduplicated
  std::vector<Json> attempts;
  std::vector<Json> aggregates;
  std::vector<Json> reports;
  // "<segment>: <n>" for every segment that had a partial trailing line.
  std::vector<std::string> quarantined;
  std::size_t duplicate_votes = 0;

  const JudgeSpec* judge(const std::string& id) const;
};

// Keeps the last vote for each (task_id, judge_id), preserving the position of
// that last occurrence. Returns the number of dropped duplicates.
std::size_t dedupe_votes(std::vector<Vote>& votes);

// Directory layout under `root`:
//   datasets/<sha256 of samples.ndjson>/samples.ndjson
//   runs/<run_id>/{manifest,tasks,votes,attempts,aggregates,reports}.ndjson
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path dataset_dir(const std::string& hash) const;
  std::filesystem::path run_dir(const std::string& run_id) const;
  std::filesystem::path segment(const std::string& run_id, const std::string& name) const;

  // Idempotent: the same samples always land under the same hash.
  std::string put_dataset(std::span<const Sample> samples);
  std::vector<Sample> load_dataset(const std::string& hash) const;

  bool run_exists(const std::string& run_id) const;
  void create_run(const RunManifest& manifest, std::span<const ComparisonTask> tasks);
  RunManifest load_manifest(const std::string& run_id) const;
  RunData load_run(const std::string& run_id) const;

  // Adds a judge registration to the manifest segment unless an identical
  // spec is already present; a different spec under the same id conflicts.
  void register_judge(const std::string& run_id, const JudgeSpec& judge);

  void write_aggregates(const std::string& run_id, std::span<const Json> records);
  void write_reports(const std::string& run_id, std::span<const Json> records);

 private:
  std::filesystem::path root_;
};

}  // namespace judgeprobe
