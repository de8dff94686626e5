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

#include "judgeprobe/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fmt/format.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/hashing.hpp"

namespace fs = std::filesystem;

namespace judgeprobe {

namespace {

std::string errno_text() { return std::strerror(errno); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read " + path.string() + ": " + errno_text());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(int fd, std::string_view data, const fs::path& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StorageError("write to " + path.string() + " failed: " + errno_text());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// RAII flock on "<segment>.lock".
class SegmentLock {
 public:
  explicit SegmentLock(const fs::path& segment) {
    const auto lock_path = segment.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StorageError("cannot open lock " + lock_path + ": " + errno_text());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      const int err = errno;
      ::close(fd_);
      fd_ = -1;
      if (err == EWOULDBLOCK) {
        throw ConflictError("segment " + segment.string() + " is locked by another writer");
      }
      throw StorageError("cannot lock " + lock_path + ": " + std::strerror(err));
    }
  }
  ~SegmentLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  SegmentLock(const SegmentLock&) = delete;
  SegmentLock& operator=(const SegmentLock&) = delete;
  int release() { return std::exchange(fd_, -1); }

 private:
  int fd_ = -1;
};

void check_run_id(const std::string& run_id) {
  if (run_id.empty() || run_id == "." || run_id == "..") {
    throw ValidationError("run id must be non-empty");
  }
  for (char c : run_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                    c == '.';
    if (!ok) throw ValidationError("run id '" + run_id + "' contains '" + c + "'");
  }
}

template <typename T>
std::vector<T> decode_all(const LedgerLoad& load, const fs::path& path) {
  std::vector<T> out;
  out.reserve(load.records.size());
  for (std::size_t i = 0; i < load.records.size(); ++i) {
    try {
      out.push_back(load.records[i].get<T>());
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw IntegrityError(fmt::format("{} record at byte {} does not decode: {}",
                                       path.string(), load.positions[i], e.what()));
    }
  }
  return out;
}

}  // namespace

LedgerLoad read_ledger(const fs::path& path) {
  LedgerLoad load;
  if (!fs::exists(path)) return load;
  const std::string data = read_file(path);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      load.quarantined.push_back(data.substr(pos));
      break;
    }
    ++line_no;
    const std::string_view line(data.data() + pos, nl - pos);
    if (!line.empty()) {
      try {
        load.records.push_back(Json::parse(line));
        load.positions.push_back(pos);
      } catch (const Json::parse_error& e) {
        throw IntegrityError(fmt::format("{} line {} is corrupt: {}", path.string(),
                                         line_no, e.what()));
      }
    }
    pos = nl + 1;
  }
  return load;
}

LedgerWriter::LedgerWriter(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  SegmentLock lock(path_);
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StorageError("cannot open " + path_.string() + ": " + errno_text());

  struct stat st {};
  if (::fstat(fd_, &st) != 0) {
    ::close(fd_);
    throw StorageError("cannot stat " + path_.string() + ": " + errno_text());
  }
  end_ = static_cast<std::uint64_t>(st.st_size);
  if (end_ > 0) {
    const std::string data = read_file(path_);
    const auto last_nl = data.rfind('\n');
    const std::uint64_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (keep < data.size()) {
      const auto qpath = path_.string() + ".quarantine";
      std::ofstream q(qpath, std::ios::binary | std::ios::app);
      q << data.substr(keep) << '\n';
      q.flush();
      if (!q) {
        ::close(fd_);
        throw StorageError("cannot write quarantine file " + qpath);
      }
      if (::ftruncate(fd_, static_cast<off_t>(keep)) != 0) {
        ::close(fd_);
        throw StorageError("cannot truncate " + path_.string() + ": " + errno_text());
      }
      repaired_ = data.size() - keep;
      end_ = keep;
    }
  }
  lock_fd_ = lock.release();
}

LedgerWriter::~LedgerWriter() {
  if (fd_ >= 0) ::close(fd_);
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

std::uint64_t LedgerWriter::append(const Json& record) {
  std::string line = canonical(record);
  line.push_back('\n');
  const std::uint64_t pos = end_;
  write_all(fd_, line, path_);
  end_ += line.size();
  return pos;
}

void rewrite_ledger(const fs::path& path, std::span<const Json> records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  SegmentLock lock(path);
  const auto tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw StorageError("cannot open " + tmp + ": " + errno_text());
  try {
    std::string body;
    for (const auto& r : records) {
      body += canonical(r);
      body.push_back('\n');
    }
    write_all(fd, body, tmp);
    if (::fsync(fd) != 0) throw StorageError("fsync " + tmp + " failed: " + errno_text());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  fs::rename(tmp, path);
}

std::string creation_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void to_json(Json& j, const RunManifest& v) {
  Json groups = Json::array();
  for (auto g : v.groups) groups.push_back(to_string(g));
  Json modes = Json::array();
  for (auto m : v.cot_modes) modes.push_back(to_string(m));
  j = Json{{"type", "manifest"},
           {"run_id", v.run_id},
           {"dataset_hash", v.dataset_hash},
           {"judges", v.judges},
           {"seed", v.seed},
           {"votes_per_order", v.votes_per_order},
           {"groups", std::move(groups)},
           {"filter", v.filter},
           {"cot_modes", std::move(modes)},
           {"created_at", v.created_at},
           {"tool_version", v.tool_version}};
}

void from_json(const Json& j, RunManifest& v) {
  v.run_id = j.at("run_id").get<std::string>();
  v.dataset_hash = j.at("dataset_hash").get<std::string>();
  v.judges = j.value("judges", std::vector<JudgeSpec>{});
  v.seed = j.at("seed").get<std::uint64_t>();
  v.votes_per_order = j.at("votes_per_order").get<int>();
  v.groups.clear();
  for (const auto& g : j.at("groups")) v.groups.push_back(parse_group(g.get<std::string>()));
  v.filter = j.value("filter", FilterPolicy{});
  v.cot_modes.clear();
  for (const auto& m : j.value("cot_modes", Json::array())) {
    v.cot_modes.push_back(parse_cot_mode(m.get<std::string>()));
  }
  v.created_at = j.value("created_at", "");
  v.tool_version = j.value("tool_version", "");
}

const JudgeSpec* RunData::judge(const std::string& id) const {
  for (const auto& j : manifest.judges) {
    if (j.id == id) return &j;
  }
  return nullptr;
}

std::size_t dedupe_votes(std::vector<Vote>& votes) {
  std::map<std::pair<std::string, std::string>, std::size_t> last;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    last[{votes[i].task_id, votes[i].judge_id}] = i;
  }
  std::vector<Vote> kept;
  kept.reserve(last.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (last.at({votes[i].task_id, votes[i].judge_id}) == i) kept.push_back(std::move(votes[i]));
  }
  const std::size_t dropped = votes.size() - kept.size();
  votes = std::move(kept);
  return dropped;
}

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::dataset_dir(const std::string& hash) const {
  if (hash.empty() || hash.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ValidationError("dataset hash '" + hash + "' is not lowercase hex");
  }
  return root_ / "datasets" / hash;
}

fs::path Store::run_dir(const std::string& run_id) const {
  check_run_id(run_id);
  return root_ / "runs" / run_id;
}

fs::path Store::segment(const std::string& run_id, const std::string& name) const {
  return run_dir(run_id) / (name + ".ndjson");
}

std::string Store::put_dataset(std::span<const Sample> samples) {
  std::string body;
  for (const auto& s : samples) {
    body += canonical(Json(s));
    body.push_back('\n');
  }
  const std::string hash = sha256_hex(body);
  const auto dir = dataset_dir(hash);
  const auto path = dir / "samples.ndjson";
  if (fs::exists(path) && read_file(path) == body) return hash;
  std::vector<Json> records;
  records.reserve(samples.size());
  for (const auto& s : samples) records.emplace_back(s);
  rewrite_ledger(path, records);
  return hash;
}

std::vector<Sample> Store::load_dataset(const std::string& hash) const {
  const auto path = dataset_dir(hash) / "samples.ndjson";
  if (!fs::exists(path)) throw NotFoundError("dataset " + hash + " not found under " + root_.string());
  if (sha256_hex(read_file(path)) != hash) {
    throw IntegrityError("dataset segment " + path.string() + " does not match its hash " + hash);
  }
  return decode_all<Sample>(read_ledger(path), path);
}

bool Store::run_exists(const std::string& run_id) const {
  return fs::exists(segment(run_id, "manifest"));
}

void Store::create_run(const RunManifest& manifest, std::span<const ComparisonTask> tasks) {
  if (run_exists(manifest.run_id)) {
    throw ConflictError("run " + manifest.run_id + " already exists");
  }
  if (!fs::exists(dataset_dir(manifest.dataset_hash) / "samples.ndjson")) {
    throw NotFoundError("dataset " + manifest.dataset_hash + " not found");
  }
  fs::create_directories(run_dir(manifest.run_id));
  {
    std::vector<Json> records;
    records.reserve(tasks.size());
    for (const auto& t : tasks) records.emplace_back(t);
    rewrite_ledger(segment(manifest.run_id, "tasks"), records);
  }
  // Manifest last: its presence marks the run as complete.
  LedgerWriter w(segment(manifest.run_id, "manifest"));
  w.append(Json(manifest));
}

RunManifest Store::load_manifest(const std::string& run_id) const {
  const auto path = segment(run_id, "manifest");
  if (!fs::exists(path)) throw NotFoundError("run " + run_id + " not found under " + root_.string());
  const auto load = read_ledger(path);
  if (load.records.empty() || load.records.front().value("type", "") != "manifest") {
    throw IntegrityError("manifest segment " + path.string() + " has no manifest record");
  }
  auto manifest = load.records.front().get<RunManifest>();
  if (manifest.run_id != run_id) {
    throw IntegrityError("manifest segment " + path.string() + " names run " + manifest.run_id);
  }
  for (std::size_t i = 1; i < load.records.size(); ++i) {
    const auto& r = load.records[i];
    if (r.value("type", "") != "judge") {
      throw IntegrityError(fmt::format("{} record at byte {} is not a judge registration",
                                       path.string(), load.positions[i]));
    }
    auto spec = r.at("judge").get<JudgeSpec>();
    bool known = false;
    for (const auto& j : manifest.judges) known = known || j.id == spec.id;
    if (!known) manifest.judges.push_back(std::move(spec));
  }
  return manifest;
}

RunData Store::load_run(const std::string& run_id) const {
  RunData run;
  run.manifest = load_manifest(run_id);
  run.samples = load_dataset(run.manifest.dataset_hash);

  auto load_segment = [&](const std::string& name) {
    const auto path = segment(run_id, name);
    auto load = read_ledger(path);
    if (!load.quarantined.empty()) {
      run.quarantined.push_back(fmt::format("{}: {}", name, load.quarantined.size()));
    }
    return std::pair{std::move(load), path};
  };

  {
    auto [load, path] = load_segment("tasks");
    run.tasks = decode_all<ComparisonTask>(load, path);
  }
  {
    auto [load, path] = load_segment("votes");
    run.votes = decode_all<Vote>(load, path);
    run.duplicate_votes = dedupe_votes(run.votes);
  }
  run.attempts = load_segment("attempts").first.records;
  run.aggregates = load_segment("aggregates").first.records;
  run.reports = load_segment("reports").first.records;

  SampleIndex index(run.samples);
  for (const auto& t : run.tasks) {
    if (!index.contains(t.sample_id)) {
      throw IntegrityError("task " + t.id + " references sample " + t.sample_id +
                           " absent from dataset " + run.manifest.dataset_hash);
    }
  }
  return run;
}

void Store::register_judge(const std::string& run_id, const JudgeSpec& judge) {
  const auto manifest = load_manifest(run_id);
  for (const auto& j : manifest.judges) {
    if (j.id != judge.id) continue;
    if (j == judge) return;
    throw ConflictError("judge id " + judge.id + " is already registered in run " + run_id +
                        " with a different spec");
  }
  LedgerWriter w(segment(run_id, "manifest"));
  w.append(Json{{"type", "judge"}, {"judge", judge}});
}

void Store::write_aggregates(const std::string& run_id, std::span<const Json> records) {
  load_manifest(run_id);
  rewrite_ledger(segment(run_id, "aggregates"), records);
}

void Store::write_reports(const std::string& run_id, std::span<const Json> records) {
  load_manifest(run_id);
  rewrite_ledger(segment(run_id, "reports"), records);
}

}  // namespace judgeprobe
