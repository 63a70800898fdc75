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
#include <map>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "safeguard/confirmation.hpp"
#include "safeguard/detectors.hpp"
#include "safeguard/frontend.hpp"
#include "safeguard/gate.hpp"
#include "safeguard/propagation.hpp"
#include "safeguard/synthetic.hpp"

namespace safeguard {

enum class Method {
  kXyMlp,
  kBaseline,
  kCs,
  kBaselineRandomConf,
  kCsRandomConf,
  kCsImpactConf,
};

std::string method_name(Method m);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

struct ExperimentConfig {
  enum class Source { kSynthetic, kTable };
  Source source = Source::kSynthetic;
  synthetic::Config synthetic;
  std::string table_path;

  std::vector<Method> methods = all_methods();
  std::vector<double> budgets = {0.0, 0.1, 0.2, 0.5};
  std::vector<double> tau_grid = default_tau_grid();
  double train_fraction = 0.6;
  double calibration_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  /// Replace trained detectors and front-end with the generator's oracles.
  bool oracle = false;
  /// Platt-scale each concept detector on the calibration split.
  bool calibrate_detectors = true;
  /// Reproduce the printed greedy loop's overspend on the final pick.
  bool faithful_alg1 = false;

  MlpConfig detector;
  MlpConfig xy_mlp;
  LogisticTrainConfig frontend;
  PropagationConfig propagation;

  std::string out_dir = "safeguard_out";

  void validate() const;
};

/// Reads `key = value` lines; `#` starts a comment. See README for keys.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

/// Thresholds reported in the coverage tables.
const std::vector<double>& table_taus();

struct CurveKey {
  Method method;
  double budget;
  auto operator<=>(const CurveKey&) const = default;
};

struct PlanKey {
  Method method;
  double budget;
  double tau;
  auto operator<=>(const PlanKey&) const = default;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> calibration;
  std::vector<std::size_t> test;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::map<CurveKey, std::vector<CurvePoint>> curves;
  SplitIndices split;
  /// Component metrics, e.g. detector accuracy on the test split.
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> notes;
  /// Confirmation plans at the table thresholds, ids as in test_table.
  std::map<PlanKey, ConfirmationPlan> plans;
  /// Front-end and test-split concept probabilities, for review sessions.
  std::optional<FrontEndModel> frontend;
  ProbabilityTable test_table;
  double wall_seconds = 0.0;
};

/// Seeded permutation cut into train / calibration / test.
SplitIndices make_split(std::size_t n, double train_fraction, double calibration_fraction,
                        std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Feature-only baseline: MLP on x, Platt-scaled on the calibration rows.
struct XyScorer {
  Mlp net;
  PlattScaler scaler;
  double predict(std::span<const double> x) const { return scaler.apply(net.predict(x)); }
};
XyScorer train_xy_mlp(const Dataset& train, const Dataset& calibration, const MlpConfig& config);

/// Writes curves/<method>_b<budget>.csv, coverage_b<budget>.csv and
/// manifest.json under out_dir. Contents are a pure function of result,
/// excluding wall-clock time.
void emit_reports(const ExperimentResult& result, const std::string& out_dir);

}  // namespace safeguard
