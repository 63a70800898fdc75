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

#include "safeguard/frontend.hpp"

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

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::kParse, "not a number: '" + s + "'");
  }
  if (used != s.size()) fail(ErrorCode::kParse, "not a number: '" + s + "'");
  return v;
}

void check_pairs(std::span<const ConceptLabelPair> pairs, int num_classes) {
  require(!pairs.empty(), "no training pairs");
  const auto m = pairs.front().concepts.size();
  for (const auto& pr : pairs) {
    if (pr.concepts.size() != m) fail(ErrorCode::kInvalidArgument, "concept dimension mismatch");
    check_hard(pr.concepts);
    require(pr.label >= 0 && pr.label < num_classes, "label out of range");
  }
}

}  // namespace

FrontEndModel FrontEndModel::logistic(std::vector<double> weights, double intercept) {
  for (double w : weights) require(std::isfinite(w), "weights must be finite");
  require(std::isfinite(intercept), "intercept must be finite");
  FrontEndModel m;
  m.kind_ = Kind::kLogistic;
  m.num_concepts_ = weights.size();
  m.num_classes_ = 2;
  m.weights_ = std::move(weights);
  m.intercept_ = intercept;
  return m;
}

FrontEndModel FrontEndModel::tabular(std::size_t num_concepts, int num_classes,
                                     std::vector<double> rows) {
  if (num_concepts > kMaxTableConcepts) fail(ErrorCode::kLimitExceeded, "table too large");
  require(num_classes >= 2, "tabular model needs at least two classes");
  const std::size_t n_rows = std::size_t{1} << num_concepts;
  require(rows.size() == n_rows * static_cast<std::size_t>(num_classes), "table size mismatch");
  for (std::size_t r = 0; r < n_rows; ++r) {
    double sum = 0.0;
    for (int y = 0; y < num_classes; ++y) {
      const double v = rows[r * num_classes + y];
      require(v >= 0.0 && v <= 1.0, "table entry outside [0, 1]");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "table row does not sum to 1");
  }
  FrontEndModel m;
  m.kind_ = Kind::kTabular;
  m.num_concepts_ = num_concepts;
  m.num_classes_ = num_classes;
  m.table_ = std::move(rows);
  return m;
}

std::size_t FrontEndModel::concept_index(std::span<const std::uint8_t> c) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k]) idx |= std::size_t{1} << k;
  }
  return idx;
}

double FrontEndModel::predict_positive(std::span<const std::uint8_t> c) const {
  require(num_classes_ == 2, "predict_positive needs a binary model");
  require(c.size() == num_concepts_, "concept dimension mismatch");
  check_hard(c);
  if (kind_ == Kind::kTabular) return table_[concept_index(c) * 2 + 1];
  double z = intercept_;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k]) z += weights_[k];
  }
  return safeguard::logistic(z);
}

std::vector<double> FrontEndModel::predict(std::span<const std::uint8_t> c) const {
  require(c.size() == num_concepts_, "concept dimension mismatch");
  check_hard(c);
  std::vector<double> out(num_classes_, 0.0);
  accumulate(c, 1.0, out);
  return out;
}

void FrontEndModel::accumulate(std::span<const std::uint8_t> c, double weight,
                               std::span<double> out) const {
  if (kind_ == Kind::kLogistic) {
    double z = intercept_;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k]) z += weights_[k];
    }
    const double p = safeguard::logistic(z);
    out[0] += weight * (1.0 - p);
    out[1] += weight * p;
    return;
  }
  const double* row = table_.data() + concept_index(c) * num_classes_;
  for (int y = 0; y < num_classes_; ++y) out[y] += weight * row[y];
}

void FrontEndModel::save(std::ostream& os) const {
  if (kind_ == Kind::kLogistic) {
    os << "frontend v1 kind=logistic m=" << num_concepts_ << '\n';
    for (double w : weights_) os << format_double(w) << '\n';
    os << format_double(intercept_) << '\n';
  } else {
    os << "frontend v1 kind=tabular m=" << num_concepts_ << " classes=" << num_classes_ << '\n';
    for (double v : table_) os << format_double(v) << '\n';
  }
}

FrontEndModel FrontEndModel::load(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) fail(ErrorCode::kParse, "empty model file");
  std::istringstream hs(header);
  std::string magic, version, kind_field, m_field, classes_field;
  hs >> magic >> version >> kind_field >> m_field;
  if (magic != "frontend" || version != "v1") fail(ErrorCode::kParse, "unsupported model header: " + header);
  if (m_field.rfind("m=", 0) != 0) fail(ErrorCode::kParse, "missing m= in model header");
  const auto m = static_cast<std::size_t>(parse_double(m_field.substr(2)));

  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    values.push_back(parse_double(line));
  }
  if (kind_field == "kind=logistic") {
    if (values.size() != m + 1) fail(ErrorCode::kParse, "logistic model needs m+1 parameters");
    const double b = values.back();
    values.pop_back();
    return logistic(std::move(values), b);
  }
  if (kind_field == "kind=tabular") {
    hs >> classes_field;
    if (classes_field.rfind("classes=", 0) != 0) fail(ErrorCode::kParse, "missing classes= in model header");
    const int k = static_cast<int>(parse_double(classes_field.substr(8)));
    return tabular(m, k, std::move(values));
  }
  fail(ErrorCode::kParse, "unknown model kind: " + kind_field);
}

void FrontEndModel::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path);
  save(os);
  if (!os) fail(ErrorCode::kIo, "write failed: " + path);
}

FrontEndModel FrontEndModel::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot read " + path);
  return load(is);
}

double logistic_stability_bound(std::span<const ConceptLabelPair> pairs, double l2) {
  // The loss is L-smooth with L <= max_i |(c_i, 1)|^2 / 4 + l2, and gradient
  // descent cannot increase an L-smooth objective for steps up to 2 / L.
  std::size_t max_norm2 = 0;
  for (const auto& pr : pairs) {
    std::size_t ones = 1;
    for (auto v : pr.concepts) ones += v;
    max_norm2 = std::max(max_norm2, ones);
  }
  return 2.0 / (0.25 * static_cast<double>(max_norm2) + l2);
}

LogisticTrainResult train_frontend_logistic(std::span<const ConceptLabelPair> pairs,
                                            const LogisticTrainConfig& config) {
  check_pairs(pairs, 2);
  bool seen[2] = {false, false};
  for (const auto& pr : pairs) seen[pr.label] = true;
  if (!seen[0] || !seen[1]) fail(ErrorCode::kDegenerateLabels, "degenerate labels");
  require(config.epochs >= 0, "epochs must be non-negative");
  require(config.learning_rate > 0.0, "learning rate must be positive");
  require(config.l2 >= 0.0, "L2 strength must be non-negative");

  const std::size_t m = pairs.front().concepts.size();
  const double n = static_cast<double>(pairs.size());
  const double lr = std::min(config.learning_rate, logistic_stability_bound(pairs, config.l2));

  std::vector<double> w(m, 0.0);
  double b = 0.0;
  std::vector<double> grad(m);
  std::vector<double> losses;
  losses.reserve(config.epochs + 1);

  for (int epoch = 0; epoch <= config.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double loss = 0.0;
    for (const auto& pr : pairs) {
      double z = b;
      for (std::size_t k = 0; k < m; ++k) {
        if (pr.concepts[k]) z += w[k];
      }
      loss += softplus(z) - (pr.label ? z : 0.0);
      const double err = logistic(z) - pr.label;
      for (std::size_t k = 0; k < m; ++k) {
        if (pr.concepts[k]) grad[k] += err;
      }
      grad_b += err;
    }
    double penalty = 0.0;
    for (double wk : w) penalty += wk * wk;
    losses.push_back(loss / n + 0.5 * config.l2 * penalty);
    if (epoch == config.epochs) break;
    for (std::size_t k = 0; k < m; ++k) w[k] -= lr * (grad[k] / n + config.l2 * w[k]);
    b -= lr * grad_b / n;
  }
  return {FrontEndModel::logistic(std::move(w), b), std::move(losses), lr};
}

FrontEndModel train_frontend_tabular(std::span<const ConceptLabelPair> pairs, int num_classes,
                                     double smoothing) {
  require(num_classes >= 2, "tabular model needs at least two classes");
  require(smoothing >= 0.0, "smoothing must be non-negative");
  check_pairs(pairs, num_classes);
  const std::size_t m = pairs.front().concepts.size();
  if (m > kMaxTableConcepts) fail(ErrorCode::kLimitExceeded, "table too large");

  const std::size_t n_rows = std::size_t{1} << m;
  const auto k = static_cast<std::size_t>(num_classes);
  std::vector<double> counts(n_rows * k, 0.0);
  for (const auto& pr : pairs) counts[FrontEndModel::concept_index(pr.concepts) * k + pr.label] += 1.0;

  std::vector<double> rows(n_rows * k);
  for (std::size_t r = 0; r < n_rows; ++r) {
    double total = 0.0;
    for (std::size_t y = 0; y < k; ++y) total += counts[r * k + y];
    const double denom = total + smoothing * static_cast<double>(k);
    for (std::size_t y = 0; y < k; ++y) {
      rows[r * k + y] = denom > 0.0 ? (counts[r * k + y] + smoothing) / denom : 1.0 / static_cast<double>(k);
    }
  }
  return FrontEndModel::tabular(m, num_classes, std::move(rows));
}

}  // namespace safeguard
