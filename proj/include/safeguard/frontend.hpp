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
#include <utility>
#include <vector>

#include "safeguard/types.hpp"

namespace safeguard {

/// Front-end model f mapping hard concepts to label probabilities.
///
/// Two kinds exist: a binary logistic model (the canonical path) and a
/// multiclass lookup table with one label distribution per hard concept
/// vector. Instances are immutable once built.
class FrontEndModel {
 public:
  enum class Kind { kLogistic, kTabular };

  static FrontEndModel logistic(std::vector<double> weights, double intercept);
  /// rows holds 2^m distributions of num_classes entries each, row index
  /// given by concept_index().
  static FrontEndModel tabular(std::size_t num_concepts, int num_classes, std::vector<double> rows);

  Kind kind() const { return kind_; }
  std::size_t num_concepts() const { return num_concepts_; }
  int num_classes() const { return num_classes_; }
  std::span<const double> weights() const { return weights_; }
  double intercept() const { return intercept_; }
  std::span<const double> table() const { return table_; }

  /// Row index of a hard concept vector: concept k contributes bit k.
  static std::size_t concept_index(std::span<const std::uint8_t> c);

  /// Pr(y = 1 | c) for binary models. Throws on multiclass tables.
  double predict_positive(std::span<const std::uint8_t> c) const;
  /// Distribution over all classes.
  std::vector<double> predict(std::span<const std::uint8_t> c) const;
  /// Appends the distribution to out without validation; hot path for
  /// propagation.
  void accumulate(std::span<const std::uint8_t> c, double weight, std::span<double> out) const;

  void save(std::ostream& os) const;
  static FrontEndModel load(std::istream& is);
  void save_file(const std::string& path) const;
  static FrontEndModel load_file(const std::string& path);

 private:
  FrontEndModel() = default;

  Kind kind_ = Kind::kLogistic;
  std::size_t num_concepts_ = 0;
  int num_classes_ = 2;
  std::vector<double> weights_;
  double intercept_ = 0.0;
  std::vector<double> table_;
};

/// A hard concept vector with its label; input to front-end training.
struct ConceptLabelPair {
  HardConcepts concepts;
  int label = 0;
};

struct LogisticTrainConfig {
  double learning_rate = 1.0;
  int epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

struct LogisticTrainResult {
  FrontEndModel model;
  /// Regularized loss before each epoch's update, plus the final loss.
  std::vector<double> epoch_losses;
  /// Learning rate actually used after clamping to the stability bound.
  double learning_rate = 0.0;
};

/// Largest step size for which full-batch gradient descent on the
/// regularized logistic loss is guaranteed not to increase the loss.
double logistic_stability_bound(std::span<const ConceptLabelPair> pairs, double l2);

/// Full-batch gradient descent on L2-regularized logistic loss. The learning
/// rate is clamped to logistic_stability_bound. Starts from zero parameters;
/// the seed is accepted for interface symmetry and does not affect the
/// result.
LogisticTrainResult train_frontend_logistic(std::span<const ConceptLabelPair> pairs,
                                            const LogisticTrainConfig& config = {});

/// Laplace-smoothed conditional frequency table. Requires m <= 20.
FrontEndModel train_frontend_tabular(std::span<const ConceptLabelPair> pairs, int num_classes,
                                     double smoothing = 1.0);

inline constexpr std::size_t kMaxTableConcepts = 20;

}  // namespace safeguard
