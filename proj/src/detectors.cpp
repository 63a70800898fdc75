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

#include "safeguard/detectors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "safeguard/error.hpp"
#include "safeguard/rng.hpp"

namespace safeguard {
namespace {

std::string format_probability(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of("eE") != std::string::npos) return s;
  const auto dot = s.find('.');
  if (dot == std::string::npos) s += '.';
  const auto decimals = s.size() - s.find('.') - 1;
  if (decimals < 6) s.append(6 - decimals, '0');
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Mlp::Mlp(std::size_t inputs, std::size_t hidden, std::uint64_t seed)
    : w1(inputs * hidden), b1(hidden, 0.0), w2(hidden), inputs_(inputs), hidden_(hidden) {
  require(inputs >= 1 && hidden >= 1, "network dimensions must be positive");
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& v : w1) v = s1 * rng.normal();
  for (auto& v : w2) v = s2 * rng.normal();
}

double Mlp::predict(std::span<const double> x) const {
  require(x.size() == inputs_, "feature dimension mismatch");
  double z = b2;
  for (std::size_t h = 0; h < hidden_; ++h) {
    double a = b1[h];
    const double* row = w1.data() + h * inputs_;
    for (std::size_t j = 0; j < inputs_; ++j) a += row[j] * x[j];
    z += w2[h] * std::tanh(a);
  }
  return logistic(z);
}

Mlp Mlp::train(std::span<const std::vector<double>> inputs, std::span<const int> targets,
               const MlpConfig& config) {
  require(inputs.size() == targets.size(), "inputs and targets differ in length");
  require(!inputs.empty(), "no training rows");
  require(config.batch_size >= 1 && config.epochs >= 0 && config.learning_rate > 0.0,
          "invalid training configuration");
  const std::size_t d = inputs.front().size();
  for (const auto& x : inputs) require(x.size() == d, "feature dimension mismatch");

  Mlp net(d, config.hidden, mix64(config.seed ^ 0x6d6c70ULL));
  const std::size_t H = config.hidden;
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);

  std::vector<double> g_w1(d * H), g_b1(H), g_w2(H), act(H), pre(H);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(g_w1.begin(), g_w1.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      double g_b2 = 0.0;
      for (std::size_t t = start; t < end; ++t) {
        const auto& x = inputs[order[t]];
        double z = net.b2;
        for (std::size_t h = 0; h < H; ++h) {
          double a = net.b1[h];
          const double* row = net.w1.data() + h * d;
          for (std::size_t j = 0; j < d; ++j) a += row[j] * x[j];
          act[h] = std::tanh(a);
          z += net.w2[h] * act[h];
        }
        const double err = logistic(z) - targets[order[t]];
        g_b2 += err;
        for (std::size_t h = 0; h < H; ++h) {
          g_w2[h] += err * act[h];
          const double back = err * net.w2[h] * (1.0 - act[h] * act[h]);
          g_b1[h] += back;
          double* grow = g_w1.data() + h * d;
          for (std::size_t j = 0; j < d; ++j) grow[j] += back * x[j];
        }
      }
      const double step = config.learning_rate / static_cast<double>(end - start);
      for (std::size_t i = 0; i < g_w1.size(); ++i) net.w1[i] -= step * g_w1[i];
      for (std::size_t h = 0; h < H; ++h) {
        net.b1[h] -= step * g_b1[h];
        net.w2[h] -= step * g_w2[h];
      }
      net.b2 -= step * g_b2;
    }
  }
  return net;
}

double ConceptDetector::predict(std::span<const double> x) const {
  const double s = net.predict(x);
  return scaler ? scaler->apply(s) : s;
}

std::vector<ConceptDetector> train_detectors(const Dataset& data, const MlpConfig& config,
                                             std::span<const HardConcepts> observed) {
  data.validate();
  require(observed.empty() || observed.size() == data.size(), "observation mask size mismatch");
  const std::size_t m = data.num_concepts;
  std::vector<ConceptDetector> detectors(m);
  detail::parallel_for(m, [&](std::size_t k) {
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    bool seen[2] = {false, false};
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!observed.empty() && !observed[i].at(k)) continue;
      xs.push_back(data.rows[i].features);
      ys.push_back(data.rows[i].concepts[k]);
      seen[ys.back()] = true;
    }
    if (!seen[0] || !seen[1]) {
      fail(ErrorCode::kDegenerateLabels, "concept " + std::to_string(k + 1) + ": degenerate labels");
    }
    MlpConfig cfg = config;
    cfg.seed = mix64(config.seed + 0x1000 * (k + 1));
    detectors[k].net = Mlp::train(xs, ys, cfg);
  });
  return detectors;
}

ConceptProbs predict_concepts(std::span<const ConceptDetector> detectors, std::span<const double> x) {
  std::vector<double> q(detectors.size());
  for (std::size_t k = 0; k < detectors.size(); ++k) q[k] = detectors[k].predict(x);
  return ConceptProbs(std::move(q));
}

std::vector<std::size_t> calibrate_detectors(std::vector<ConceptDetector>& detectors,
                                             const Dataset& holdout) {
  holdout.validate();
  require(holdout.num_concepts == detectors.size(), "detector count mismatch");
  std::vector<std::size_t> skipped;
  for (std::size_t k = 0; k < detectors.size(); ++k) {
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(holdout.size());
    for (const auto& row : holdout.rows) {
      scores.push_back(detectors[k].raw(row.features));
      labels.push_back(row.concepts[k]);
    }
    try {
      detectors[k].scaler = fit_platt(scores, labels);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateLabels) throw;
      std::cerr << "warning: concept " << k + 1 << ": holdout labels are single-class; not calibrated\n";
      skipped.push_back(k);
    }
  }
  return skipped;
}

void write_probability_table(std::ostream& os, const ProbabilityTable& table) {
  const std::size_t m = table.num_concepts;
  os << "id";
  for (std::size_t k = 1; k <= m; ++k) os << ",q" << k;
  if (table.has_concepts) {
    for (std::size_t k = 1; k <= m; ++k) os << ",c" << k;
  }
  os << ",y\n";
  for (const auto& row : table.rows) {
    require(row.q.size() == m, "row width mismatch");
    os << row.id;
    for (double v : row.q) os << ',' << format_probability(v);
    if (table.has_concepts) {
      require(row.concepts && row.concepts->size() == m, "row is missing concepts");
      for (auto c : *row.concepts) os << ',' << static_cast<int>(c);
    }
    os << ',' << row.label << '\n';
  }
}

ProbabilityTable read_probability_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::kParse, "missing header");
  const auto header = split_csv(line);
  if (header.size() < 3 || header.front() != "id" || header.back() != "y") {
    fail(ErrorCode::kParse, "malformed header: expected id,q1..qm[,c1..cm],y");
  }
  ProbabilityTable table;
  std::size_t col = 1;
  while (col + 1 < header.size() && header[col] == "q" + std::to_string(col)) ++col;
  table.num_concepts = col - 1;
  const std::size_t m = table.num_concepts;
  if (m == 0) fail(ErrorCode::kParse, "malformed header: no q columns");
  if (header.size() == 2 + 2 * m) {
    table.has_concepts = true;
    for (std::size_t k = 1; k <= m; ++k) {
      if (header[m + k] != "c" + std::to_string(k)) fail(ErrorCode::kParse, "malformed header: expected c" + std::to_string(k));
    }
  } else if (header.size() != 2 + m) {
    fail(ErrorCode::kParse, "malformed header: unexpected columns");
  }

  std::size_t row_no = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++row_no;
    const std::string where = "row " + std::to_string(row_no);
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) fail(ErrorCode::kParse, where + ": expected " + std::to_string(header.size()) + " fields");
    ProbabilityRow row;
    auto number = [&](const std::string& s) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        fail(ErrorCode::kParse, where + ": non-numeric field '" + s + "'");
      }
      if (used != s.size()) fail(ErrorCode::kParse, where + ": non-numeric field '" + s + "'");
      return v;
    };
    auto integer = [&](const std::string& s) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        fail(ErrorCode::kParse, where + ": expected a non-negative integer, got '" + s + "'");
      }
      try {
        return std::stoull(s);
      } catch (const std::exception&) {
        fail(ErrorCode::kParse, where + ": integer out of range '" + s + "'");
      }
    };
    row.id = integer(cells[0]);
    for (std::size_t k = 0; k < m; ++k) {
      const double v = number(cells[1 + k]);
      if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::kParse, where + ": q" + std::to_string(k + 1) + " outside [0, 1]");
      row.q.push_back(v);
    }
    if (table.has_concepts) {
      HardConcepts c(m);
      for (std::size_t k = 0; k < m; ++k) {
        const auto v = integer(cells[1 + m + k]);
        if (v > 1) fail(ErrorCode::kParse, where + ": c" + std::to_string(k + 1) + " must be 0 or 1");
        c[k] = static_cast<std::uint8_t>(v);
      }
      row.concepts = std::move(c);
    }
    row.label = static_cast<int>(integer(cells.back()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

ProbabilityTable ingest_probability_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot read " + path);
  return read_probability_table(is);
}

}  // namespace safeguard
