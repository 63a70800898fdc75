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
#include <cmath>
#include <numbers>
#include <string>

#include "safeguard/error.hpp"
#include "safeguard/rng.hpp"
#include "safeguard/types.hpp"

namespace safeguard {

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void check_hard(std::span<const std::uint8_t> c) {
  for (auto v : c) {
    if (v > 1) fail(ErrorCode::kInvalidArgument, "hard concepts required");
  }
}

void check_probabilities(std::span<const double> p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0 && p[k] <= 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           "probability " + std::to_string(k + 1) + " outside [0, 1]: " + std::to_string(p[k]));
    }
  }
}

void Dataset::validate() const {
  for (const auto& row : rows) {
    if (row.features.size() != num_features || row.concepts.size() != num_concepts) {
      fail(ErrorCode::kInvalidArgument, "row " + std::to_string(row.id) + ": dimension mismatch");
    }
    check_hard(row.concepts);
    if (row.label < 0 || row.label >= num_classes) {
      fail(ErrorCode::kInvalidArgument, "row " + std::to_string(row.id) + ": label out of range");
    }
  }
}

ConceptProbs::ConceptProbs(std::vector<double> probs) : probs_(std::move(probs)) {
  check_probabilities(probs_);
}

PartiallyConfirmed::PartiallyConfirmed(const ConceptProbs& q)
    : probs_(q.values().begin(), q.values().end()), confirmed_(q.size(), 0) {}

void PartiallyConfirmed::confirm(std::size_t k, std::uint8_t value) {
  require(k < probs_.size(), "concept index out of range");
  require(value <= 1, "confirmed value must be 0 or 1");
  probs_[k] = value;
  confirmed_[k] = 1;
}

std::vector<std::size_t> PartiallyConfirmed::confirmed() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < confirmed_.size(); ++k) {
    if (confirmed_[k]) out.push_back(k);
  }
  return out;
}

}  // namespace safeguard
