// Copyright 2026 The Safeguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <mutex>
#include <regex>
#include <shared_mutex>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "safeguard/error.hpp"
#include "safeguard/review.hpp"

namespace safeguard::review {
namespace {

using nlohmann::json;

json metrics_json(const SessionMetrics& m) {
  json j = {{"n_total", m.n_total},
            {"n_covered", m.n_covered},
            {"coverage", m.coverage},
            {"confirmations", m.confirmations},
            {"budget_spent", m.budget_spent},
            {"budget_remaining", m.budget_remaining}};
  j["selective_accuracy"] = m.selective_accuracy ? json(*m.selective_accuracy) : json(nullptr);
  return j;
}

json flags_json(const InstanceState& s) {
  json flags = json::array();
  for (const auto& f : s.flags) flags.push_back({{"concept", f.concept_index + 1}, {"gain", f.gain}});
  return flags;
}

json instance_json(const InstanceState& s) {
  json confirmed = json::array();
  for (auto k : s.p.confirmed()) confirmed.push_back(k + 1);
  json j = {{"id", s.id},
            {"score", s.score},
            {"covered", !s.decision.abstained()},
            {"p", std::vector<double>(s.p.values().begin(), s.p.values().end())},
            {"confirmed", confirmed},
            {"flags", flags_json(s)}};
  j["decision"] = s.decision.abstained() ? json("abstain") : json(s.decision.label());
  return j;
}

const char* reason_of(const Error& e) {
  const std::string what = e.what();
  switch (e.code()) {
    case ErrorCode::kNotFound: return "unknown_instance";
    case ErrorCode::kBudgetExhausted: return "budget_exhausted";
    case ErrorCode::kConflict:
      return what.find("covered") != std::string::npos ? "already_covered" : "already_confirmed";
    default: return "invalid_request";
  }
}

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kBudgetExhausted: return 409;
    case ErrorCode::kInternal:
    case ErrorCode::kIo: return 500;
    default: return 400;
  }
}

}  // namespace

struct ReviewServer::Impl {
  explicit Impl(ReviewSession s) : session(std::move(s)) {}

  ReviewSession session;
  mutable std::shared_mutex mutex;
  httplib::Server http;

  json envelope(json body) const {
    body["revision"] = session.revision();
    return body;
  }

  std::pair<int, std::string> error(int status, const char* reason, const std::string& detail) const {
    json body = {{"error", reason}, {"detail", detail}};
    if (std::string(reason) == "budget_exhausted") body["budget_remaining"] = session.budget_remaining();
    return {status, envelope(std::move(body)).dump()};
  }

  std::pair<int, std::string> read(const std::string& path) const {
    static const std::regex instance_re("^/instances/([0-9]+)$");
    std::smatch match;
    if (path == "/session") {
      const auto& cfg = session.config();
      json body = {{"config",
                    {{"tau", cfg.tau},
                     {"budget", cfg.budget},
                     {"costs", cfg.costs},
                     {"num_concepts", session.num_concepts()},
                     {"num_instances", session.instances().size()}}},
                   {"metrics", metrics_json(session.metrics())}};
      return {200, envelope(std::move(body)).dump()};
    }
    if (path == "/metrics") return {200, envelope({{"metrics", metrics_json(session.metrics())}}).dump()};
    if (path == "/abstentions") {
      json list = json::array();
      for (const auto* s : session.abstentions()) {
        list.push_back({{"id", s->id}, {"score", s->score}, {"flags", flags_json(*s)}});
      }
      return {200, envelope({{"abstentions", list}}).dump()};
    }
    if (std::regex_match(path, match, instance_re)) {
      try {
        const auto& s = session.instance(std::stoull(match[1].str()));
        return {200, envelope({{"instance", instance_json(s)}}).dump()};
      } catch (const Error& e) {
        return error(status_of(e.code()), reason_of(e), e.what());
      } catch (const std::out_of_range&) {
        return error(404, "unknown_instance", "instance id out of range");
      }
    }
    return error(404, "not_found", "no route for GET " + path);
  }

  std::pair<int, std::string> write(const std::string& path, const std::string& body) {
    static const std::regex confirm_re("^/instances/([0-9]+)/confirm$");
    std::smatch match;
    if (!std::regex_match(path, match, confirm_re)) return error(404, "not_found", "no route for POST " + path);
    InstanceId id = 0;
    try {
      id = std::stoull(match[1].str());
    } catch (const std::out_of_range&) {
      return error(404, "unknown_instance", "instance id out of range");
    }
    json req;
    try {
      req = json::parse(body);
    } catch (const json::exception& e) {
      return error(400, "invalid_request", std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object() || !req.contains("concept") || !req.contains("value") ||
        !req["concept"].is_number_integer() || !req["value"].is_number_integer()) {
      return error(400, "invalid_request", "body must be {\"concept\": k, \"value\": 0|1}");
    }
    const auto k = req["concept"].get<long long>();
    const auto v = req["value"].get<long long>();
    if (k < 1 || static_cast<std::size_t>(k) > session.num_concepts()) {
      return error(400, "invalid_request", "concept must lie in 1.." + std::to_string(session.num_concepts()));
    }
    if (v != 0 && v != 1) return error(400, "invalid_request", "value must be 0 or 1");
    try {
      const auto& s = session.confirm(id, static_cast<std::size_t>(k - 1), static_cast<std::uint8_t>(v));
      return {200, envelope({{"instance", instance_json(s)}, {"metrics", metrics_json(session.metrics())}}).dump()};
    } catch (const Error& e) {
      return error(status_of(e.code()), reason_of(e), e.what());
    }
  }
};

ReviewServer::ReviewServer(ReviewSession session) : impl_(std::make_unique<Impl>(std::move(session))) {
  auto respond = [](httplib::Response& res, const std::pair<int, std::string>& out) {
    res.status = out.first;
    res.set_content(out.second, "application/json");
  };
  auto get = [this, respond](const httplib::Request& req, httplib::Response& res) {
    std::shared_lock lock(impl_->mutex);
    respond(res, impl_->read(req.path));
  };
  impl_->http.Get("/session", get);
  impl_->http.Get("/metrics", get);
  impl_->http.Get("/abstentions", get);
  impl_->http.Get(R"(/instances/([0-9]+))", get);
  impl_->http.Post(R"(/instances/([0-9]+)/confirm)", [this, respond](const httplib::Request& req, httplib::Response& res) {
    std::unique_lock lock(impl_->mutex);
    respond(res, impl_->write(req.path, req.body));
  });
}

ReviewServer::~ReviewServer() { stop(); }

std::pair<int, std::string> ReviewServer::handle(const std::string& method, const std::string& path,
                                                 const std::string& body) {
  if (method == "GET") {
    std::shared_lock lock(impl_->mutex);
    return impl_->read(path);
  }
  if (method == "POST") {
    std::unique_lock lock(impl_->mutex);
    return impl_->write(path, body);
  }
  std::shared_lock lock(impl_->mutex);
  return impl_->error(405, "method_not_allowed", method);
}

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool ReviewServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

bool ReviewServer::running() const { return impl_->http.is_running(); }

}  // namespace safeguard::review
