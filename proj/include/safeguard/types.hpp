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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace safeguard {

using InstanceId = std::uint64_t;

/// Hard concept vector; every entry is 0 or 1.
using HardConcepts = std::vector<std::uint8_t>;

struct Instance {
  InstanceId id = 0;
  std::vector<double> features;
  HardConcepts concepts;
  int label = 0;
};

/// Rows of (features, concepts, label) sharing dimensions d and m.
struct Dataset {
  std::size_t num_features = 0;
  std::size_t num_concepts = 0;
  int num_classes = 2;
  std::vector<Instance> rows;

  std::size_t size() const { return rows.size(); }
  /// Throws if any row disagrees with the declared dimensions.
  void validate() const;
};

/// Detector output q; entries in [0, 1].
class ConceptProbs {
 public:
  ConceptProbs() = default;
  explicit ConceptProbs(std::vector<double> probs);

  std::span<const double> values() const { return probs_; }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// q with a subset S of entries replaced by confirmed 0/1 values.
class PartiallyConfirmed {
 public:
  PartiallyConfirmed() = default;
  /// Unconfirmed view of q.
  explicit PartiallyConfirmed(const ConceptProbs& q);

  /// Pins entry k to value. Throws if k is out of range.
  void confirm(std::size_t k, std::uint8_t value);

  std::span<const double> values() const { return probs_; }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::size_t size() const { return probs_.size(); }
  bool is_confirmed(std::size_t k) const { return confirmed_[k] != 0; }
  /// Confirmed indices in ascending order.
  std::vector<std::size_t> confirmed() const;

 private:
  std::vector<double> probs_;
  std::vector<std::uint8_t> confirmed_;
};

/// Either a class index or an abstention.
class GateDecision {
 public:
  static GateDecision abstain() { return GateDecision(); }
  static GateDecision predict(int label) { return GateDecision(label); }

  bool abstained() const { return !label_.has_value(); }
  int label() const { return label_.value(); }
  friend bool operator==(const GateDecision&, const GateDecision&) = default;

 private:
  GateDecision() = default;
  explicit GateDecision(int label) : label_(label) {}
  std::optional<int> label_;
};

/// Throws ErrorCode::kInvalidArgument unless every entry of c is 0 or 1.
void check_hard(std::span<const std::uint8_t> c);
void check_probabilities(std::span<const double> p);

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace safeguard
