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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "safeguard/frontend.hpp"
#include "safeguard/types.hpp"

namespace safeguard {

/// Per-concept confirmation costs; all strictly positive.
class ConfirmationCosts {
 public:
  explicit ConfirmationCosts(std::vector<double> gamma);
  static ConfirmationCosts unit(std::size_t m) { return ConfirmationCosts(std::vector<double>(m, 1.0)); }

  double operator[](std::size_t k) const { return gamma_[k]; }
  std::size_t size() const { return gamma_.size(); }

 private:
  std::vector<double> gamma_;
};

/// Budget B. Strict budgets never overspend; non-strict budgets follow the
/// printed greedy loop, which subtracts first and stops once B < 0.
struct ConfirmationBudget {
  double budget = 0.0;
  bool strict = true;
};

struct Selection {
  InstanceId instance = 0;
  std::size_t concept_index = 0;
  double gain = 0.0;
  double cost = 0.0;
};

/// Ordered (instance, concept) selections.
struct ConfirmationPlan {
  std::vector<Selection> selections;
  double total_cost = 0.0;

  /// Concept indices chosen for one instance, in selection order.
  std::vector<std::size_t> concepts_for(InstanceId id) const;
};

struct AbstainedInstance {
  InstanceId id = 0;
  ConceptProbs q;
};

/// Scalar whose variance Gain measures: Pr(y = 1) for binary models, the
/// probability of the argmax class of f(p) otherwise.
double gain_target(const FrontEndModel& model, std::span<const double> p);

/// Variance of the propagated prediction induced by the unknown value of
/// concept k: q_k (1 - q_k) (f(q[k<-1]) - f(q[k<-0]))^2.
double gain(const FrontEndModel& model, std::span<const double> q, std::size_t k);

/// Gains for every concept of q.
std::vector<double> gains(const FrontEndModel& model, std::span<const double> q);

/// Greedy selection over precomputed gains. gain_table[i][k] is the gain of
/// concept k on abstained[i].
ConfirmationPlan greedy_select_gains(std::span<const InstanceId> ids,
                                     std::span<const std::vector<double>> gain_table,
                                     const ConfirmationCosts& costs,
                                     const ConfirmationBudget& budget);

/// Highest-gain (instance, concept) pairs first; ties go to the smaller
/// instance id, then the smaller concept index. Gains are computed once from
/// the unconfirmed q.
ConfirmationPlan greedy_select(std::span<const AbstainedInstance> abstained,
                               const FrontEndModel& model, const ConfirmationCosts& costs,
                               const ConfirmationBudget& budget);

/// Uniformly random (instance, concept) pairs under the same budget rule.
ConfirmationPlan random_select(std::span<const InstanceId> ids, std::size_t num_concepts,
                               const ConfirmationCosts& costs, const ConfirmationBudget& budget,
                               std::uint64_t seed);
ConfirmationPlan random_select(std::span<const AbstainedInstance> abstained,
                               const ConfirmationCosts& costs, const ConfirmationBudget& budget,
                               std::uint64_t seed);

/// Confirmation policy pi_S: entry k becomes truth_k for k in S.
PartiallyConfirmed apply_confirmation(const ConceptProbs& q, std::span<const std::size_t> S,
                                      std::span<const std::uint8_t> truth);

/// Plan file: `instance_id,concept_index,gain,cost` per line in selection
/// order. Concept indices are written 1-based.
void write_plan_csv(std::ostream& os, const ConfirmationPlan& plan);
ConfirmationPlan read_plan_csv(std::istream& is);

}  // namespace safeguard
