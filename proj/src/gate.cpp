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

#include "safeguard/gate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "safeguard/error.hpp"

namespace safeguard {
namespace {

constexpr double kClip = 1e-6;

void check_labels(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "scores and labels differ in length");
  for (int y : labels) require(y == 0 || y == 1, "binary labels required");
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

GateThreshold::GateThreshold(double tau) : tau_(tau) {
  require(tau >= 0.0 && tau <= 0.5, "tau must lie in [0, 0.5]");
}

GateDecision apply_gate(double positive_score, GateThreshold tau) {
  const double t = tau.value();
  if (positive_score < t) return GateDecision::predict(0);
  if (positive_score > 1.0 - t) return GateDecision::predict(1);
  return GateDecision::abstain();
}

GateDecision apply_gate(std::span<const double> soft, GateThreshold tau) {
  require(!soft.empty(), "empty score vector");
  if (soft.size() == 1) return apply_gate(soft[0], tau);
  if (soft.size() == 2) return apply_gate(soft[1], tau);
  const auto best = std::max_element(soft.begin(), soft.end());
  if (*best > 1.0 - tau.value()) return GateDecision::predict(static_cast<int>(best - soft.begin()));
  return GateDecision::abstain();
}

CurvePoint evaluate_decisions(double tau, std::span<const GateDecision> decisions,
                              std::span<const int> labels) {
  require(decisions.size() == labels.size(), "decisions and labels differ in length");
  require(!decisions.empty(), "empty evaluation set");
  std::size_t covered = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].abstained()) continue;
    ++covered;
    if (decisions[i].label() == labels[i]) ++correct;
  }
  CurvePoint pt;
  pt.tau = tau;
  pt.n_covered = covered;
  pt.coverage = static_cast<double>(covered) / static_cast<double>(decisions.size());
  if (covered > 0) pt.selective_accuracy = static_cast<double>(correct) / static_cast<double>(covered);
  return pt;
}

std::vector<CurvePoint> accuracy_coverage_curve(std::span<const double> scores,
                                                std::span<const int> labels,
                                                std::span<const double> tau_grid) {
  check_labels(scores, labels);
  require(!scores.empty(), "empty evaluation set");
  require(!tau_grid.empty(), "empty tau grid");
  require(std::is_sorted(tau_grid.begin(), tau_grid.end()), "tau grid must be sorted ascending");
  std::vector<CurvePoint> curve;
  curve.reserve(tau_grid.size());
  std::vector<GateDecision> decisions(scores.size(), GateDecision::abstain());
  for (double tau : tau_grid) {
    const GateThreshold t(tau);
    for (std::size_t i = 0; i < scores.size(); ++i) decisions[i] = apply_gate(scores[i], t);
    curve.push_back(evaluate_decisions(tau, decisions, labels));
  }
  return curve;
}

std::vector<double> default_tau_grid(double step) {
  require(step > 0.0 && step <= 0.5, "tau step must lie in (0, 0.5]");
  const auto n = static_cast<std::size_t>(std::llround(0.5 / step));
  std::vector<double> grid;
  for (std::size_t i = 0; i <= n; ++i) {
    grid.push_back(std::min(0.5, std::round(static_cast<double>(i) * step * 1e12) / 1e12));
  }
  return grid;
}

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "tau,coverage,selective_accuracy,n_covered\n";
  for (const auto& pt : curve) {
    os << fixed6(pt.tau) << ',' << fixed6(pt.coverage) << ','
       << (pt.selective_accuracy ? fixed6(*pt.selective_accuracy) : std::string("NA")) << ','
       << pt.n_covered << '\n';
  }
}

void write_curve_file(const std::string& path, std::span<const CurvePoint> curve) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path);
  write_curve_csv(os, curve);
  if (!os) fail(ErrorCode::kIo, "write failed: " + path);
}

std::vector<CurvePoint> read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "tau,coverage,selective_accuracy,n_covered") {
    fail(ErrorCode::kParse, "bad curve header");
  }
  std::vector<CurvePoint> curve;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tau, cov, acc, n;
    if (!std::getline(ls, tau, ',') || !std::getline(ls, cov, ',') || !std::getline(ls, acc, ',') ||
        !std::getline(ls, n)) {
      fail(ErrorCode::kParse, "bad curve row: " + line);
    }
    CurvePoint pt;
    try {
      pt.tau = std::stod(tau);
      pt.coverage = std::stod(cov);
      if (acc != "NA") pt.selective_accuracy = std::stod(acc);
      pt.n_covered = std::stoull(n);
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "bad curve row: " + line);
    }
    curve.push_back(pt);
  }
  return curve;
}

double clipped_logit(double score) {
  const double s = std::clamp(score, kClip, 1.0 - kClip);
  return std::log(s / (1.0 - s));
}

double PlattScaler::apply(double score) const { return logistic(a * clipped_logit(score) + b); }

PlattScaler fit_platt(std::span<const double> scores, std::span<const int> labels) {
  check_labels(scores, labels);
  require(!scores.empty(), "empty calibration set");
  std::size_t positives = 0;
  for (int y : labels) positives += y;
  if (positives == 0 || positives == labels.size()) fail(ErrorCode::kDegenerateLabels, "degenerate labels");

  std::vector<double> z(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) z[i] = clipped_logit(scores[i]);
  const double n = static_cast<double>(scores.size());
  // A vanishing ridge keeps the Hessian invertible when every z is equal.
  constexpr double kRidge = 1e-10;

  auto loss_at = [&](double a, double b) {
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double t = a * z[i] + b;
      const double sp = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
      total += sp - (labels[i] ? t : 0.0);
    }
    return total / n + 0.5 * kRidge * (a * a + b * b);
  };

  double a = 1.0;
  double b = 0.0;
  double loss = loss_at(a, b);
  for (int iter = 0; iter < 200; ++iter) {
    double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double pr = logistic(a * z[i] + b);
      const double err = pr - labels[i];
      const double h = pr * (1.0 - pr);
      ga += err * z[i];
      gb += err;
      haa += h * z[i] * z[i];
      hab += h * z[i];
      hbb += h;
    }
    ga = ga / n + kRidge * a;
    gb = gb / n + kRidge * b;
    haa = haa / n + kRidge;
    hab /= n;
    hbb = hbb / n + kRidge;
    const double det = haa * hbb - hab * hab;
    if (!(det > 0.0)) break;
    const double da = (hbb * ga - hab * gb) / det;
    const double db = (haa * gb - hab * ga) / det;

    double step = 1.0;
    double next = loss;
    double na = a, nb = b;
    for (int halve = 0; halve < 60; ++halve) {
      na = a - step * da;
      nb = b - step * db;
      next = loss_at(na, nb);
      if (next <= loss) break;
      step *= 0.5;
    }
    if (!(next <= loss)) break;
    const bool converged = std::abs(na - a) + std::abs(nb - b) < 1e-12;
    a = na;
    b = nb;
    loss = next;
    if (converged) break;
  }
  return {a, b};
}

double expected_calibration_error(std::span<const double> scores, std::span<const int> labels,
                                  std::size_t n_bins) {
  check_labels(scores, labels);
  require(!scores.empty(), "empty input");
  require(n_bins >= 1, "n_bins must be at least 1");
  std::vector<double> sum_score(n_bins, 0.0);
  std::vector<double> sum_label(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], 0.0, 1.0);
    auto bin = static_cast<std::size_t>(s * static_cast<double>(n_bins));
    if (bin >= n_bins) bin = n_bins - 1;
    sum_score[bin] += scores[i];
    sum_label[bin] += labels[i];
    ++count[bin];
  }
  double ece = 0.0;
  const double n = static_cast<double>(scores.size());
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    const double c = static_cast<double>(count[b]);
    ece += (c / n) * std::abs(sum_score[b] / c - sum_label[b] / c);
  }
  return ece;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_labels(scores, labels);
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return scores[l] < scores[r]; });
  // Mann-Whitney U with average ranks over ties.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) fail(ErrorCode::kDegenerateLabels, "degenerate labels");
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

GateThreshold tune_threshold(std::span<const double> scores, std::span<const int> labels,
                             double target_accuracy) {
  require(!scores.empty(), "empty calibration split");
  require(target_accuracy > 0.0 && target_accuracy < 1.0, "target accuracy must lie in (0, 1)");
  const auto grid = default_tau_grid(0.005);
  const auto curve = accuracy_coverage_curve(scores, labels, grid);
  for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
    if (it->selective_accuracy && *it->selective_accuracy >= target_accuracy) return GateThreshold(it->tau);
  }
  return GateThreshold(0.0);
}

}  // namespace safeguard
