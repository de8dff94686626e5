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

#include "judgeprobe/chat_client.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <thread>

#include "judgeprobe/codec.hpp"
#include "judgeprobe/errors.hpp"
#include "judgeprobe/rng.hpp"

namespace judgeprobe {

HttpChatTransport::HttpChatTransport(EndpointConfig config)
    : config_(std::move(config)) {}

std::string HttpChatTransport::request_body(const ChatRequest& request) const {
  Json body{{"model", config_.model},
            {"temperature", request.temperature},
            {"messages",
             Json::array({Json{{"role", "system"}, {"content", request.system}},
                          Json{{"role", "user"}, {"content", request.user}}})}};
  return body.dump();
}

std::string HttpChatTransport::send(const ChatRequest& request) {
  httplib::Client client(config_.base_url);
  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    const char* token = std::getenv(config_.auth_env.c_str());
    if (token == nullptr) {
      throw AuthError("environment variable " + config_.auth_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  auto res = client.Post(config_.path, headers, request_body(request),
                         "application/json");
  if (!res) {
    throw TransportError("request to " + config_.base_url + config_.path +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError(fmt::format("endpoint rejected credentials (HTTP {})",
                                res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError(fmt::format("HTTP {}: {}", res->status,
                                     res->body.substr(0, 200)));
  }
  return parse_chat_response(res->body);
}

std::string parse_chat_response(const std::string& body) {
  Json j = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw TransportError("response is not JSON");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception&) {
    throw TransportError("response lacks choices[0].message.content");
  }
}

RetryPolicy RetryPolicy::from(const EndpointConfig& c) {
  RetryPolicy p;
  p.max_retries = c.max_retries;
  p.initial_backoff = std::chrono::milliseconds(c.initial_backoff_ms);
  p.max_backoff = std::chrono::milliseconds(c.max_backoff_ms);
  p.factor = c.backoff_factor;
  p.jitter = c.jitter;
  return p;
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry,
                                        double jitter_unit) {
  const double base = static_cast<double>(policy.initial_backoff.count()) *
                      std::pow(policy.factor, retry);
  double delay = std::min(base, static_cast<double>(policy.max_backoff.count()));
  if (policy.jitter) delay = delay / 2.0 + jitter_unit * delay / 2.0;
  return std::chrono::milliseconds(static_cast<std::int64_t>(delay));
}

CallOutcome call_with_retry(ChatTransport& transport, const ChatRequest& request,
                            const RetryPolicy& policy, std::uint64_t jitter_seed,
                            const Sleeper& sleep) {
  CallOutcome out;
  DerivedStream jitter(jitter_seed, "backoff");
  const int max_attempts = 1 + std::max(0, policy.max_retries);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    AttemptRecord rec;
    rec.attempt = attempt;
    bool retryable = true;
    try {
      out.content = transport.send(request);
      rec.ok = true;
    } catch (const AuthError& e) {
      rec.error = e.what();
      retryable = false;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    out.total_latency_ms += rec.latency_ms;
    out.attempts = attempt;
    out.log.push_back(rec);
    if (rec.ok) return out;
    out.last_error = rec.error;
    if (!retryable || attempt == max_attempts) break;
    const auto delay = backoff_delay(policy, attempt - 1, jitter.unit());
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
  return out;
}

TransportFactory http_transport_factory() {
  return [](const EndpointConfig& c) -> std::unique_ptr<ChatTransport> {
    return std::make_unique<HttpChatTransport>(c);
  };
}

}  // namespace judgeprobe
