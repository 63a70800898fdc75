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

#include "safeguard/confirmation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "safeguard/error.hpp"
#include "safeguard/propagation.hpp"
#include "safeguard/rng.hpp"

namespace safeguard {
namespace {

struct Candidate {
  std::size_t row = 0;
  std::size_t concept_index = 0;
  double gain = 0.0;
};

// Walks candidates in order and applies the budget rule.
ConfirmationPlan take_within_budget(std::span<const Candidate> order,
                                    std::span<const InstanceId> ids,
                                    const ConfirmationCosts& costs,
                                    const ConfirmationBudget& budget) {
  require(budget.budget >= 0.0, "budget must be non-negative");
  ConfirmationPlan plan;
  double remaining = budget.budget;
  if (budget.strict) {
    const double slack = 1e-9 * std::max(1.0, budget.budget);
    for (const auto& c : order) {
      const double cost = costs[c.concept_index];
      if (cost > remaining + slack) continue;
      plan.selections.push_back({ids[c.row], c.concept_index, c.gain, cost});
      plan.total_cost += cost;
      remaining -= cost;
    }
    return plan;
  }
  if (remaining <= 0.0) return plan;
  for (const auto& c : order) {
    const double cost = costs[c.concept_index];
    plan.selections.push_back({ids[c.row], c.concept_index, c.gain, cost});
    plan.total_cost += cost;
    remaining -= cost;
    if (remaining < 0.0) break;
  }
  return plan;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfirmationCosts::ConfirmationCosts(std::vector<double> gamma) : gamma_(std::move(gamma)) {
  for (double g : gamma_) require(g > 0.0 && std::isfinite(g), "confirmation costs must be positive");
}

std::vector<std::size_t> ConfirmationPlan::concepts_for(InstanceId id) const {
  std::vector<std::size_t> out;
  for (const auto& s : selections) {
    if (s.instance == id) out.push_back(s.concept_index);
  }
  return out;
}

double gain_target(const FrontEndModel& model, std::span<const double> p) {
  const auto dist = propagate_exact(model, p);
  if (dist.size() == 2) return dist[1];
  return *std::max_element(dist.begin(), dist.end());
}

double gain(const FrontEndModel& model, std::span<const double> q, std::size_t k) {
  require(k < q.size(), "concept index out of range");
  require(q.size() == model.num_concepts(), "concept dimension mismatch");
  const double qk = q[k];
  if (qk == 0.0 || qk == 1.0) {
    check_probabilities(q);
    return 0.0;
  }
  std::size_t cls = 1;
  if (model.num_classes() > 2) {
    const auto dist = propagate_exact(model, q);
    cls = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  }
  std::vector<double> pinned(q.begin(), q.end());
  pinned[k] = 1.0;
  const double present = propagate_exact(model, pinned)[cls];
  pinned[k] = 0.0;
  const double absent = propagate_exact(model, pinned)[cls];
  const double diff = present - absent;
  return qk * (1.0 - qk) * diff * diff;
}

std::vector<double> gains(const FrontEndModel& model, std::span<const double> q) {
  std::vector<double> out(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) out[k] = gain(model, q, k);
  return out;
}

ConfirmationPlan greedy_select_gains(std::span<const InstanceId> ids,
                                     std::span<const std::vector<double>> gain_table,
                                     const ConfirmationCosts& costs,
                                     const ConfirmationBudget& budget) {
  require(ids.size() == gain_table.size(), "ids and gain table differ in length");
  std::vector<Candidate> order;
  for (std::size_t i = 0; i < gain_table.size(); ++i) {
    require(gain_table[i].size() == costs.size(), "gain row and costs differ in length");
    for (std::size_t k = 0; k < gain_table[i].size(); ++k) order.push_back({i, k, gain_table[i][k]});
  }
  std::sort(order.begin(), order.end(), [&](const Candidate& l, const Candidate& r) {
    if (l.gain != r.gain) return l.gain > r.gain;
    if (ids[l.row] != ids[r.row]) return ids[l.row] < ids[r.row];
    return l.concept_index < r.concept_index;
  });
  return take_within_budget(order, ids, costs, budget);
}

ConfirmationPlan greedy_select(std::span<const AbstainedInstance> abstained,
                               const FrontEndModel& model, const ConfirmationCosts& costs,
                               const ConfirmationBudget& budget) {
  std::vector<InstanceId> ids;
  std::vector<std::vector<double>> table;
  ids.reserve(abstained.size());
  table.reserve(abstained.size());
  for (const auto& a : abstained) {
    ids.push_back(a.id);
    table.push_back(gains(model, a.q.values()));
  }
  return greedy_select_gains(ids, table, costs, budget);
}

ConfirmationPlan random_select(std::span<const InstanceId> ids, std::size_t num_concepts,
                               const ConfirmationCosts& costs, const ConfirmationBudget& budget,
                               std::uint64_t seed) {
  require(costs.size() == num_concepts, "costs and concepts differ in length");
  std::vector<Candidate> order;
  order.reserve(ids.size() * num_concepts);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t k = 0; k < num_concepts; ++k) order.push_back({i, k, 0.0});
  }
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());
  return take_within_budget(order, ids, costs, budget);
}

ConfirmationPlan random_select(std::span<const AbstainedInstance> abstained,
                               const ConfirmationCosts& costs, const ConfirmationBudget& budget,
                               std::uint64_t seed) {
  std::vector<InstanceId> ids;
  for (const auto& a : abstained) {
    require(a.q.size() == costs.size(), "costs and concepts differ in length");
    ids.push_back(a.id);
  }
  return random_select(ids, costs.size(), costs, budget, seed);
}

PartiallyConfirmed apply_confirmation(const ConceptProbs& q, std::span<const std::size_t> S,
                                      std::span<const std::uint8_t> truth) {
  require(truth.size() == q.size(), "truth and q differ in length");
  check_hard(truth);
  PartiallyConfirmed p(q);
  for (std::size_t k : S) p.confirm(k, truth[k]);
  return p;
}

void write_plan_csv(std::ostream& os, const ConfirmationPlan& plan) {
  os << "instance_id,concept_index,gain,cost\n";
  for (const auto& s : plan.selections) {
    os << s.instance << ',' << s.concept_index + 1 << ',' << format_double(s.gain) << ','
       << format_double(s.cost) << '\n';
  }
}

ConfirmationPlan read_plan_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "instance_id,concept_index,gain,cost") {
    fail(ErrorCode::kParse, "bad plan header");
  }
  ConfirmationPlan plan;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, k, g, c;
    if (!std::getline(ls, id, ',') || !std::getline(ls, k, ',') || !std::getline(ls, g, ',') ||
        !std::getline(ls, c)) {
      fail(ErrorCode::kParse, "bad plan row: " + line);
    }
    try {
      const auto concept_index = std::stoull(k);
      if (concept_index == 0) fail(ErrorCode::kParse, "concept indices are 1-based: " + line);
      plan.selections.push_back({std::stoull(id), concept_index - 1, std::stod(g), std::stod(c)});
    } catch (const std::logic_error&) {
      fail(ErrorCode::kParse, "bad plan row: " + line);
    }
    plan.total_cost += plan.selections.back().cost;
  }
  return plan;
}

}  // namespace safeguard
