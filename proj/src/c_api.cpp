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

#include "safeguard/safeguard.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "json.hpp"
#include "safeguard/confirmation.hpp"
#include "safeguard/error.hpp"
#include "safeguard/experiment.hpp"
#include "safeguard/frontend.hpp"
#include "safeguard/gate.hpp"
#include "safeguard/propagation.hpp"
#include "safeguard/review.hpp"
#include "safeguard/synthetic.hpp"

struct sg_model {
  safeguard::FrontEndModel model;
};

struct sg_session {
  std::unique_ptr<safeguard::review::ReviewSession> session;
};

struct sg_server {
  std::unique_ptr<safeguard::review::ReviewServer> server;
};

namespace {

using safeguard::ErrorCode;

thread_local std::string g_last_error;

sg_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return SG_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDegenerateLabels: return SG_ERR_DEGENERATE_LABELS;
    case ErrorCode::kLimitExceeded: return SG_ERR_LIMIT_EXCEEDED;
    case ErrorCode::kIo: return SG_ERR_IO;
    case ErrorCode::kParse: return SG_ERR_PARSE;
    case ErrorCode::kNotFound: return SG_ERR_NOT_FOUND;
    case ErrorCode::kConflict: return SG_ERR_CONFLICT;
    case ErrorCode::kBudgetExhausted: return SG_ERR_BUDGET_EXHAUSTED;
    case ErrorCode::kInternal: return SG_ERR_INTERNAL;
  }
  return SG_ERR_INTERNAL;
}

template <class Fn>
sg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return SG_OK;
  } catch (const safeguard::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (!p) safeguard::fail(ErrorCode::kInvalidArgument, std::string(name) + " is null");
}

void write_distribution(const std::vector<double>& dist, double* out, size_t out_len) {
  need(out, "out");
  if (out_len < dist.size()) {
    safeguard::fail(ErrorCode::kInvalidArgument,
                    "output buffer holds " + std::to_string(out_len) + " values, need " + std::to_string(dist.size()));
  }
  std::copy(dist.begin(), dist.end(), out);
}

}  // namespace

extern "C" {

const char* sg_version(void) { return "1.0.0"; }

const char* sg_last_error(void) { return g_last_error.c_str(); }

const char* sg_status_name(sg_status status) {
  switch (status) {
    case SG_OK: return "ok";
    case SG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SG_ERR_DEGENERATE_LABELS: return "degenerate labels";
    case SG_ERR_LIMIT_EXCEEDED: return "limit exceeded";
    case SG_ERR_IO: return "i/o error";
    case SG_ERR_PARSE: return "parse error";
    case SG_ERR_NOT_FOUND: return "not found";
    case SG_ERR_CONFLICT: return "conflict";
    case SG_ERR_BUDGET_EXHAUSTED: return "budget exhausted";
    case SG_ERR_INTERNAL: return "internal error";
    case SG_ERR_BUFFER_TOO_SMALL: return "buffer too small";
  }
  return "unknown status";
}

sg_status sg_model_create_logistic(const double* weights, size_t num_concepts, double intercept,
                                   sg_model** out) {
  return guarded([&] {
    need(out, "out");
    if (num_concepts > 0) need(weights, "weights");
    std::vector<double> w(weights, weights + num_concepts);
    *out = new sg_model{safeguard::FrontEndModel::logistic(std::move(w), intercept)};
  });
}

sg_status sg_model_create_oracle(sg_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = new sg_model{safeguard::synthetic::oracle_frontend()};
  });
}

sg_status sg_model_load(const char* path, sg_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sg_model{safeguard::FrontEndModel::load_file(path)};
  });
}

sg_status sg_model_save(const sg_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    model->model.save_file(path);
  });
}

void sg_model_free(sg_model* model) { delete model; }

sg_status sg_model_num_concepts(const sg_model* model, size_t* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = model->model.num_concepts();
  });
}

sg_status sg_model_num_classes(const sg_model* model, size_t* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = static_cast<size_t>(model->model.num_classes());
  });
}

sg_status sg_model_predict(const sg_model* model, const uint8_t* concepts, size_t m, double* out,
                           size_t out_len) {
  return guarded([&] {
    need(model, "model");
    if (m > 0) need(concepts, "concepts");
    write_distribution(model->model.predict({concepts, m}), out, out_len);
  });
}

sg_status sg_propagate_exact(const sg_model* model, const double* probs, size_t m, double* out,
                             size_t out_len) {
  return guarded([&] {
    need(model, "model");
    if (m > 0) need(probs, "probs");
    write_distribution(safeguard::propagate_exact(model->model, {probs, m}), out, out_len);
  });
}

sg_status sg_propagate_mc(const sg_model* model, const double* probs, size_t m, uint64_t samples,
                          uint64_t seed, double* out, size_t out_len) {
  return guarded([&] {
    need(model, "model");
    if (m > 0) need(probs, "probs");
    safeguard::PropagationConfig cfg;
    cfg.mode = safeguard::PropagationConfig::Mode::kMonteCarlo;
    cfg.mc_samples = samples;
    cfg.seed = seed;
    write_distribution(safeguard::propagate_mc(model->model, {probs, m}, cfg), out, out_len);
  });
}

sg_status sg_gain(const sg_model* model, const double* q, size_t m, size_t concept_index, double* out) {
  return guarded([&] {
    need(model, "model");
    need(q, "q");
    need(out, "out");
    safeguard::require(concept_index >= 1 && concept_index <= m, "concept index must lie in 1..m");
    *out = safeguard::gain(model->model, {q, m}, concept_index - 1);
  });
}

sg_status sg_apply_gate(const double* soft, size_t len, double tau, int* decision) {
  return guarded([&] {
    need(soft, "soft");
    need(decision, "decision");
    const auto d = safeguard::apply_gate({soft, len}, safeguard::GateThreshold(tau));
    *decision = d.abstained() ? SG_ABSTAIN : d.label();
  });
}

sg_status sg_synth_generate_file(size_t n, double noise, uint64_t seed, const char* path) {
  return guarded([&] {
    need(path, "path");
    safeguard::synthetic::write_file(path, safeguard::synthetic::generate({n, noise, seed}));
  });
}

sg_status sg_run_experiment_file(const char* config_path, const char* out_dir) {
  return guarded([&] {
    need(config_path, "config_path");
    auto cfg = safeguard::load_config(config_path);
    if (out_dir) cfg.out_dir = out_dir;
    const auto result = safeguard::run_experiment(cfg);
    safeguard::emit_reports(result, cfg.out_dir);
    std::cerr << "safeguard: run finished in " << result.wall_seconds << " s; reports in " << cfg.out_dir << '\n';
  });
}

sg_status sg_curves_file(const char* in_path, const char* out_path, const double* taus, size_t n_taus) {
  return guarded([&] {
    need(in_path, "in_path");
    need(out_path, "out_path");
    std::ifstream is(in_path);
    if (!is) safeguard::fail(ErrorCode::kIo, std::string("cannot read ") + in_path);
    std::string line;
    if (!std::getline(is, line) || (line != "score,y" && line != "score,label")) {
      safeguard::fail(ErrorCode::kParse, "expected header score,y");
    }
    std::vector<double> scores;
    std::vector<int> labels;
    std::size_t row = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      ++row;
      const auto comma = line.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("missing field");
        std::size_t used = 0;
        const double s = std::stod(line.substr(0, comma), &used);
        const std::string y = line.substr(comma + 1);
        if (used != comma || (y != "0" && y != "1")) throw std::invalid_argument("bad field");
        if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("score outside [0, 1]");
        scores.push_back(s);
        labels.push_back(y == "1");
      } catch (const std::logic_error& e) {
        safeguard::fail(ErrorCode::kParse, "row " + std::to_string(row) + ": " + e.what());
      }
    }
    std::vector<double> grid = taus && n_taus > 0 ? std::vector<double>(taus, taus + n_taus)
                                                  : safeguard::default_tau_grid();
    safeguard::write_curve_file(out_path, safeguard::accuracy_coverage_curve(scores, labels, grid));
  });
}

sg_status sg_session_open(const sg_model* model, const char* table_path, double tau, double budget,
                          const double* costs, size_t num_costs, const char* log_path, sg_session** out) {
  return guarded([&] {
    need(model, "model");
    need(table_path, "table_path");
    need(out, "out");
    const auto table = safeguard::ingest_probability_table(table_path);
    safeguard::review::SessionConfig cfg;
    cfg.tau = tau;
    cfg.budget = budget;
    if (costs) cfg.costs.assign(costs, costs + num_costs);
    std::unique_ptr<safeguard::review::ReviewSession> session;
    if (log_path) {
      const auto records = safeguard::review::ReviewSession::read_log_file(log_path);
      session = std::make_unique<safeguard::review::ReviewSession>(
          safeguard::review::ReviewSession::replay(model->model, table, cfg, records));
      session->attach_log_file(log_path);
    } else {
      session = std::make_unique<safeguard::review::ReviewSession>(model->model, table, cfg);
    }
    *out = new sg_session{std::move(session)};
  });
}

void sg_session_free(sg_session* session) { delete session; }

sg_status sg_session_confirm(sg_session* session, uint64_t instance_id, size_t concept_index, int value) {
  return guarded([&] {
    need(session, "session");
    safeguard::require(concept_index >= 1, "concept indices are 1-based");
    safeguard::require(value == 0 || value == 1, "value must be 0 or 1");
    session->session->confirm(instance_id, concept_index - 1, static_cast<std::uint8_t>(value));
  });
}

sg_status sg_session_score(const sg_session* session, uint64_t instance_id, double* score, int* decision) {
  return guarded([&] {
    need(session, "session");
    const auto& s = session->session->instance(instance_id);
    if (score) *score = s.score;
    if (decision) *decision = s.decision.abstained() ? SG_ABSTAIN : s.decision.label();
  });
}

sg_status sg_session_coverage(const sg_session* session, double* coverage, double* budget_remaining) {
  return guarded([&] {
    need(session, "session");
    const auto m = session->session->metrics();
    if (coverage) *coverage = m.coverage;
    if (budget_remaining) *budget_remaining = m.budget_remaining;
  });
}

sg_status sg_session_metrics_json(const sg_session* session, char* buf, size_t cap, size_t* needed) {
  sg_status status = SG_OK;
  const sg_status guard_status = guarded([&] {
    need(session, "session");
    const auto m = session->session->metrics();
    nlohmann::json j = {{"revision", session->session->revision()},
                        {"metrics",
                         {{"n_total", m.n_total},
                          {"n_covered", m.n_covered},
                          {"coverage", m.coverage},
                          {"confirmations", m.confirmations},
                          {"budget_spent", m.budget_spent},
                          {"budget_remaining", m.budget_remaining}}}};
    j["metrics"]["selective_accuracy"] =
        m.selective_accuracy ? nlohmann::json(*m.selective_accuracy) : nlohmann::json(nullptr);
    const std::string text = j.dump();
    if (needed) *needed = text.size() + 1;
    if (!buf || cap < text.size() + 1) {
      g_last_error = "buffer too small";
      status = SG_ERR_BUFFER_TOO_SMALL;
      return;
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
  return guard_status != SG_OK ? guard_status : status;
}

sg_status sg_server_create(sg_session* session, sg_server** out) {
  return guarded([&] {
    need(session, "session");
    need(out, "out");
    auto server = std::make_unique<safeguard::review::ReviewServer>(std::move(*session->session));
    delete session;
    *out = new sg_server{std::move(server)};
  });
}

sg_status sg_server_bind(sg_server* server, const char* host, int port, int* bound_port) {
  return guarded([&] {
    need(server, "server");
    need(host, "host");
    const int bound = server->server->bind(host, port);
    if (bound < 0) safeguard::fail(ErrorCode::kIo, "cannot bind " + std::string(host) + ":" + std::to_string(port));
    if (bound_port) *bound_port = bound;
  });
}

sg_status sg_server_run(sg_server* server) {
  return guarded([&] {
    need(server, "server");
    if (!server->server->listen_after_bind()) safeguard::fail(ErrorCode::kIo, "server stopped with an error");
  });
}

void sg_server_stop(sg_server* server) {
  if (server) server->server->stop();
}

void sg_server_free(sg_server* server) { delete server; }

}  // extern "C"
