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

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "safeguard/confirmation.hpp"
#include "safeguard/detectors.hpp"
#include "safeguard/frontend.hpp"
#include "safeguard/gate.hpp"

namespace safeguard::review {

struct Flag {
  std::size_t concept_index = 0;
  double gain = 0.0;
};

struct InstanceState {
  InstanceId id = 0;
  PartiallyConfirmed p;
  double score = 0.0;
  GateDecision decision = GateDecision::abstain();
  /// Unconfirmed concepts ranked by gain on the current p; empty once covered.
  std::vector<Flag> flags;
  std::optional<HardConcepts> truth;
  int label = 0;
};

/// One accepted confirmation. Concept indices are 0-based in memory.
struct LogRecord {
  std::uint64_t revision = 0;
  InstanceId instance = 0;
  std::size_t concept_index = 0;
  std::uint8_t value = 0;
  std::string timestamp;
  double pre_score = 0.0;
  double post_score = 0.0;
};

struct SessionConfig {
  double tau = 0.1;
  std::vector<double> costs;  // empty means unit costs
  double budget = 0.0;
  std::size_t exact_limit = 20;
};

struct SessionMetrics {
  std::size_t n_total = 0;
  std::size_t n_covered = 0;
  double coverage = 0.0;
  std::optional<double> selective_accuracy;
  std::size_t confirmations = 0;
  double budget_spent = 0.0;
  double budget_remaining = 0.0;
};

/// Live safeguard over a fixed set of instances. Every instance is gated on
/// start; abstained instances accept confirmations until they are covered
/// or the budget runs out. Covered instances never change.
class ReviewSession {
 public:
  ReviewSession(FrontEndModel model, const ProbabilityTable& table, SessionConfig config);

  const FrontEndModel& model() const { return model_; }
  const SessionConfig& config() const { return config_; }
  std::uint64_t revision() const { return revision_; }
  std::size_t num_concepts() const { return model_.num_concepts(); }

  const InstanceState& instance(InstanceId id) const;
  const std::vector<InstanceState>& instances() const { return instances_; }
  /// Abstained instances in id order.
  std::vector<const InstanceState*> abstentions() const;

  /// Applies an observed concept value. Throws kNotFound for unknown ids,
  /// kConflict for covered instances or confirmed concepts, and
  /// kBudgetExhausted when the concept costs more than what remains.
  const InstanceState& confirm(InstanceId id, std::size_t concept_index, std::uint8_t value,
                               std::string timestamp = {});

  SessionMetrics metrics() const;
  const std::vector<LogRecord>& log() const { return log_; }
  double budget_remaining() const { return config_.budget - spent_; }

  /// Appends each future record to path as one JSON object per line.
  void attach_log_file(const std::string& path);

  /// Rebuilds a session by applying recorded confirmations in order.
  static ReviewSession replay(FrontEndModel model, const ProbabilityTable& table,
                              SessionConfig config, const std::vector<LogRecord>& records);
  static std::vector<LogRecord> read_log_file(const std::string& path);

 private:
  void refresh(InstanceState& state) const;
  double cost(std::size_t k) const;

  FrontEndModel model_;
  SessionConfig config_;
  GateThreshold tau_;
  std::vector<InstanceState> instances_;
  std::map<InstanceId, std::size_t> index_;
  std::vector<LogRecord> log_;
  std::uint64_t revision_ = 0;
  double spent_ = 0.0;
  std::unique_ptr<std::ofstream> log_file_;
};

/// HTTP front for a session. Writes are serialized; reads share a lock.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewSession session);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds host:port (port 0 picks a free port). Returns the bound port or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop().
  bool listen_after_bind();
  void stop();
  bool running() const;

  /// Request dispatch without a socket; returns (status, JSON body).
  std::pair<int, std::string> handle(const std::string& method, const std::string& path,
                                     const std::string& body);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace safeguard::review
