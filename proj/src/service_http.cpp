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

#include <httplib.h>

#include <fmt/format.h>

#include "judgeprobe/errors.hpp"
#include "judgeprobe/service.hpp"

namespace judgeprobe {

namespace {

int status_for(const Error& e) {
  const std::string_view cls = e.error_class();
  if (cls == "ValidationError" || cls == "UsageError") return 400;
  if (cls == "AuthError") return 401;
  if (cls == "NotFoundError") return 404;
  if (cls == "ConflictError") return 409;
  return 500;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(canonical(body), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view cls, std::string_view msg) {
  send_json(res, status, Json{{"error_class", cls}, {"message", msg}});
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() <= kPrefix.size() || header.compare(0, kPrefix.size(), kPrefix) != 0) {
    throw AuthError("missing bearer token");
  }
  return header.substr(kPrefix.size());
}

Json body_object(const httplib::Request& req) {
  Json j;
  try {
    j = Json::parse(req.body);
  } catch (const Json::parse_error&) {
    throw ValidationError("request body is not JSON");
  }
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  return j;
}

template <typename T>
T field(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(fmt::format("missing field '{}'", name));
  try {
    return it->template get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(fmt::format("field '{}' has the wrong type", name));
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e), e.error_class(), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

}  // namespace

struct HttpFrontend::Impl {
  explicit Impl(VotingService& s) : service(s) {}
  VotingService& service;
  httplib::Server server;
};

HttpFrontend::HttpFrontend(VotingService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;

  srv.Post("/api/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const auto body = body_object(req);
             const auto view = svc.create_session(field<std::string>(body, "judge_id"),
                                                  field<std::string>(body, "run_id"),
                                                  field<int>(body, "target"));
             send_json(res, 200, to_wire(view));
           }));
  srv.Get("/api/tasks/next", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, to_wire(svc.next_task(bearer_token(req))));
          }));
  srv.Post("/api/votes", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const auto token = bearer_token(req);
             const auto body = body_object(req);
             std::optional<std::int64_t> client;
             if (body.contains("client_elapsed_ms") && !body["client_elapsed_ms"].is_null()) {
               client = field<std::int64_t>(body, "client_elapsed_ms");
             }
             const auto ack = svc.submit_vote(token, field<std::string>(body, "task_id"),
                                              field<std::string>(body, "choice"), client);
             send_json(res, 200, to_wire(ack));
           }));
  srv.Get("/api/progress", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, to_wire(svc.progress(bearer_token(req))));
          }));
  srv.Get("/api/version", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, Json{{"api_version", kServiceApiVersion}});
  });

  if (options.static_dir) {
    if (!srv.set_mount_point("/", options.static_dir->string())) {
      throw NotFoundError("static directory " + options.static_dir->string() + " not found");
    }
  }
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw TransportError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw TransportError(fmt::format("cannot bind {}:{}", host, port));
  }
  return port;
}

void HttpFrontend::serve() { impl_->server.listen_after_bind(); }

void HttpFrontend::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpFrontend::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace judgeprobe
