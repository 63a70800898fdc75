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

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <string>

#include "json.hpp"
#include "safeguard/error.hpp"
#include "safeguard/propagation.hpp"
#include "safeguard/review.hpp"

namespace safeguard::review {
namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

}  // namespace

ReviewSession::ReviewSession(FrontEndModel model, const ProbabilityTable& table, SessionConfig config)
    : model_(std::move(model)), config_(std::move(config)), tau_(config_.tau) {
  const std::size_t m = model_.num_concepts();
  if (table.num_concepts != m) {
    fail(ErrorCode::kInvalidArgument, "table has " + std::to_string(table.num_concepts) +
                                          " concepts but the model expects " + std::to_string(m));
  }
  if (config_.costs.empty()) config_.costs.assign(m, 1.0);
  require(config_.costs.size() == m, "one cost per concept required");
  ConfirmationCosts check(config_.costs);
  require(config_.budget >= 0.0, "budget must be non-negative");

  instances_.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (index_.count(row.id)) fail(ErrorCode::kInvalidArgument, "duplicate instance id " + std::to_string(row.id));
    InstanceState state;
    state.id = row.id;
    state.p = PartiallyConfirmed(ConceptProbs(row.q));
    state.truth = row.concepts;
    state.label = row.label;
    refresh(state);
    index_[row.id] = instances_.size();
    instances_.push_back(std::move(state));
  }
}

void ReviewSession::refresh(InstanceState& state) const {
  const auto dist = propagate_exact(model_, state.p.values(), config_.exact_limit);
  state.score = dist.size() == 2 ? dist[1] : *std::max_element(dist.begin(), dist.end());
  state.decision = apply_gate(dist, tau_);
  state.flags.clear();
  if (!state.decision.abstained()) return;
  for (std::size_t k = 0; k < state.p.size(); ++k) {
    if (state.p.is_confirmed(k)) continue;
    state.flags.push_back({k, gain(model_, state.p.values(), k)});
  }
  std::stable_sort(state.flags.begin(), state.flags.end(),
                   [](const Flag& l, const Flag& r) { return l.gain > r.gain; });
}

double ReviewSession::cost(std::size_t k) const { return config_.costs[k]; }

const InstanceState& ReviewSession::instance(InstanceId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::kNotFound, "unknown instance " + std::to_string(id));
  return instances_[it->second];
}

std::vector<const InstanceState*> ReviewSession::abstentions() const {
  std::vector<const InstanceState*> out;
  for (const auto& [id, pos] : index_) {
    if (instances_[pos].decision.abstained()) out.push_back(&instances_[pos]);
  }
  return out;
}

const InstanceState& ReviewSession::confirm(InstanceId id, std::size_t concept_index, std::uint8_t value,
                                            std::string timestamp) {
  const auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::kNotFound, "unknown instance " + std::to_string(id));
  InstanceState& state = instances_[it->second];
  require(concept_index < num_concepts(), "concept index out of range");
  require(value <= 1, "confirmed value must be 0 or 1");
  if (!state.decision.abstained()) fail(ErrorCode::kConflict, "instance already covered");
  if (state.p.is_confirmed(concept_index)) fail(ErrorCode::kConflict, "concept already confirmed");
  const double c = cost(concept_index);
  const double remaining = budget_remaining();
  if (c > remaining + 1e-9 * std::max(1.0, config_.budget)) {
    fail(ErrorCode::kBudgetExhausted, "budget exhausted: remaining " + std::to_string(remaining) +
                                          ", concept costs " + std::to_string(c));
  }

  LogRecord record;
  record.pre_score = state.score;
  state.p.confirm(concept_index, value);
  refresh(state);
  spent_ += c;
  ++revision_;
  record.revision = revision_;
  record.instance = id;
  record.concept_index = concept_index;
  record.value = value;
  record.timestamp = timestamp.empty() ? utc_now() : std::move(timestamp);
  record.post_score = state.score;
  if (log_file_) {
    nlohmann::json j = {{"revision", record.revision}, {"instance", record.instance},
                        {"concept", record.concept_index + 1}, {"value", record.value},
                        {"timestamp", record.timestamp}, {"pre", record.pre_score},
                        {"post", record.post_score}};
    *log_file_ << j.dump() << '\n';
    log_file_->flush();
    if (!*log_file_) fail(ErrorCode::kIo, "cannot append to session log");
  }
  log_.push_back(std::move(record));
  return state;
}

SessionMetrics ReviewSession::metrics() const {
  SessionMetrics out;
  out.n_total = instances_.size();
  std::size_t correct = 0;
  for (const auto& s : instances_) {
    if (s.decision.abstained()) continue;
    ++out.n_covered;
    correct += s.decision.label() == s.label;
  }
  if (out.n_total > 0) out.coverage = static_cast<double>(out.n_covered) / static_cast<double>(out.n_total);
  if (out.n_covered > 0) out.selective_accuracy = static_cast<double>(correct) / static_cast<double>(out.n_covered);
  out.confirmations = log_.size();
  out.budget_spent = spent_;
  out.budget_remaining = budget_remaining();
  return out;
}

void ReviewSession::attach_log_file(const std::string& path) {
  auto os = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*os) fail(ErrorCode::kIo, "cannot open session log " + path);
  log_file_ = std::move(os);
}

ReviewSession ReviewSession::replay(FrontEndModel model, const ProbabilityTable& table, SessionConfig config,
                                    const std::vector<LogRecord>& records) {
  ReviewSession session(std::move(model), table, std::move(config));
  for (const auto& r : records) {
    const auto& state = session.confirm(r.instance, r.concept_index, r.value, r.timestamp);
    if (state.score != r.post_score) {
      fail(ErrorCode::kConflict, "log record " + std::to_string(r.revision) + " does not match the loaded artifacts");
    }
  }
  return session;
}

std::vector<LogRecord> ReviewSession::read_log_file(const std::string& path) {
  std::ifstream is(path);
  std::vector<LogRecord> out;
  if (!is) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LogRecord r;
      r.revision = j.at("revision").get<std::uint64_t>();
      r.instance = j.at("instance").get<InstanceId>();
      const auto k = j.at("concept").get<std::size_t>();
      if (k == 0) fail(ErrorCode::kParse, "log line " + std::to_string(line_no) + ": concepts are 1-based");
      r.concept_index = k - 1;
      r.value = j.at("value").get<std::uint8_t>();
      r.timestamp = j.at("timestamp").get<std::string>();
      r.pre_score = j.at("pre").get<double>();
      r.post_score = j.at("post").get<double>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, "log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace safeguard::review
