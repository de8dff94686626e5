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

// Chat-completion client shared by the generator and remote judges: one
// system + user message pair per request, capped exponential backoff with
// jitter between attempts.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "judgeprobe/judge_spec.hpp"

namespace judgeprobe {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  // Caller-chosen request key. Never sent on the wire; deterministic stubs
  // derive their output from it.
  std::string key;
};

// One round trip. Throws TransportError (retryable) or AuthError (not).
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string send(const ChatRequest& request) = 0;
};

class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(EndpointConfig config);
  std::string send(const ChatRequest& request) override;

  // Wire body for a request; exposed for tests of the request shape.
  std::string request_body(const ChatRequest& request) const;

 private:
  EndpointConfig config_;
};

// Extracts choices[0].message.content from a chat-completion response body.
std::string parse_chat_response(const std::string& body);

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{30000};
  double factor = 2.0;
  bool jitter = true;

  static RetryPolicy from(const EndpointConfig& c);
};

// Delay before retry number `retry` (0-based). Without jitter this is
// min(initial * factor^retry, max); with jitter it is drawn uniformly from
// [delay/2, delay].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry,
                                        double jitter_unit);

struct AttemptRecord {
  int attempt = 0;
  std::int64_t latency_ms = 0;
  bool ok = false;
  std::string error;
};

struct CallOutcome {
  std::optional<std::string> content;
  int attempts = 0;
  std::int64_t total_latency_ms = 0;
  std::vector<AttemptRecord> log;
  std::string last_error;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Runs one request with up to 1 + max_retries attempts. Never throws on
// transport failure; the outcome carries the last error instead.
CallOutcome call_with_retry(ChatTransport& transport, const ChatRequest& request,
                            const RetryPolicy& policy, std::uint64_t jitter_seed,
                            const Sleeper& sleep = {});

using TransportFactory =
    std::function<std::unique_ptr<ChatTransport>(const EndpointConfig&)>;

TransportFactory http_transport_factory();

}  // namespace judgeprobe
