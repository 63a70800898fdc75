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

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "safeguard/types.hpp"

namespace safeguard {

/// Confidence threshold tau in [0, 0.5].
class GateThreshold {
 public:
  explicit GateThreshold(double tau);
  double value() const { return tau_; }

 private:
  double tau_;
};

/// Selection gate. Binary scores (one entry, or two entries with the
/// positive class second) use the piecewise rule
///   0 on [0, tau), abstain on [tau, 1 - tau], 1 on (1 - tau, 1].
/// Longer distributions predict the argmax class when its probability
/// exceeds 1 - tau.
GateDecision apply_gate(std::span<const double> soft, GateThreshold tau);
GateDecision apply_gate(double positive_score, GateThreshold tau);

struct CurvePoint {
  double tau = 0.0;
  double coverage = 0.0;
  std::optional<double> selective_accuracy;
  std::size_t n_covered = 0;
};

/// Coverage and selective accuracy of gate decisions against labels.
CurvePoint evaluate_decisions(double tau, std::span<const GateDecision> decisions,
                              std::span<const int> labels);

/// One curve point per threshold for binary scores.
std::vector<CurvePoint> accuracy_coverage_curve(std::span<const double> scores,
                                                std::span<const int> labels,
                                                std::span<const double> tau_grid);

/// Evenly spaced grid over [0, 0.5]; default step 0.005 gives 101 points.
std::vector<double> default_tau_grid(double step = 0.005);

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve);
void write_curve_file(const std::string& path, std::span<const CurvePoint> curve);
std::vector<CurvePoint> read_curve_csv(std::istream& is);

/// Clips a score into [1e-6, 1 - 1e-6] and returns its log-odds.
double clipped_logit(double score);

/// Platt recalibration in log-odds space: logistic(a * logit(s) + b).
struct PlattScaler {
  double a = 1.0;
  double b = 0.0;

  double apply(double score) const;
};

/// Maximum-likelihood (a, b) by Newton iterations with step halving.
/// Throws kDegenerateLabels when only one class is present.
PlattScaler fit_platt(std::span<const double> scores, std::span<const int> labels);

/// Equal-width bins on [0, 1]; bins are left-closed, the last one closed.
double expected_calibration_error(std::span<const double> scores, std::span<const int> labels,
                                  std::size_t n_bins);

/// Area under the ROC curve with ties counted as one half.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Largest tau on the 0.005 grid whose selective accuracy on the
/// calibration split reaches target_accuracy; 0 when none does.
GateThreshold tune_threshold(std::span<const double> scores, std::span<const int> labels,
                             double target_accuracy);

}  // namespace safeguard
