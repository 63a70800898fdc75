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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safeguard/gate.hpp"
#include "safeguard/types.hpp"

namespace safeguard {

struct MlpConfig {
  std::size_t hidden = 16;
  double learning_rate = 0.05;
  int epochs = 200;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
};

/// Single hidden layer (tanh) network with one sigmoid output, trained by
/// mini-batch SGD on logistic loss.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

  /// Training rows are given as input vectors with 0/1 targets.
  static Mlp train(std::span<const std::vector<double>> inputs, std::span<const int> targets,
                   const MlpConfig& config);

  double predict(std::span<const double> x) const;
  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }

  // Row-major hidden x inputs.
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
};

/// Detector g_k for one concept plus an optional Platt scaler.
struct ConceptDetector {
  Mlp net;
  std::optional<PlattScaler> scaler;

  double raw(std::span<const double> x) const { return net.predict(x); }
  double predict(std::span<const double> x) const;
};

/// Trains one detector per concept. Each detector reads only its own
/// concept column. Rows whose concept is marked missing in `observed`
/// (same shape as the concept matrix, or empty for fully observed data) are
/// skipped for that detector.
std::vector<ConceptDetector> train_detectors(const Dataset& data, const MlpConfig& config,
                                             std::span<const HardConcepts> observed = {});

ConceptProbs predict_concepts(std::span<const ConceptDetector> detectors, std::span<const double> x);

/// Fits a scaler per concept on holdout rows. Concepts whose holdout labels
/// are single-class keep their previous state; their indices are returned.
std::vector<std::size_t> calibrate_detectors(std::vector<ConceptDetector>& detectors,
                                             const Dataset& holdout);

/// Concept probabilities from an external pipeline.
struct ProbabilityRow {
  InstanceId id = 0;
  std::vector<double> q;
  std::optional<HardConcepts> concepts;
  int label = 0;
};

struct ProbabilityTable {
  std::size_t num_concepts = 0;
  bool has_concepts = false;
  std::vector<ProbabilityRow> rows;
};

/// Header `id,q1..qm[,c1..cm],y`. Probabilities are written with 17
/// significant digits so a write/read cycle is exact.
void write_probability_table(std::ostream& os, const ProbabilityTable& table);
ProbabilityTable read_probability_table(std::istream& is);
ProbabilityTable ingest_probability_table(const std::string& path);

}  // namespace safeguard
