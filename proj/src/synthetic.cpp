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

#include "safeguard/synthetic.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "safeguard/error.hpp"
#include "safeguard/rng.hpp"

namespace safeguard::synthetic {
namespace {

constexpr const char* kHeader = "x1,x2,x3,x4,x5,c1,c2,c3,y";

}  // namespace

std::uint8_t concept_parity(std::span<const double> x, std::size_t k) {
  require(x.size() == kNumFeatures, "synthetic rows have 5 features");
  require(k < kNumConcepts, "concept index out of range");
  std::uint8_t parity = 0;
  for (std::size_t j : kParityTriples[k]) {
    require(x[j] == 0.0 || x[j] == 1.0, "synthetic features are binary");
    parity ^= static_cast<std::uint8_t>(x[j] == 1.0);
  }
  return parity;
}

Dataset generate(const Config& config) {
  require(config.n >= 1, "n must be at least 1");
  require(config.noise >= 0.0 && config.noise <= 1.0, "noise must lie in [0, 1]");
  const auto oracle = oracle_frontend();

  Dataset data;
  data.num_features = kNumFeatures;
  data.num_concepts = kNumConcepts;
  data.num_classes = 2;
  data.rows.resize(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    auto rng = Rng::substream(config.seed, i);
    Instance& row = data.rows[i];
    row.id = i;
    row.features.resize(kNumFeatures);
    for (auto& v : row.features) v = rng.bernoulli(kFeatureRate) ? 1.0 : 0.0;
    row.concepts.resize(kNumConcepts);
    for (std::size_t k = 0; k < kNumConcepts; ++k) {
      const auto flip = static_cast<std::uint8_t>(rng.bernoulli(config.noise));
      row.concepts[k] = concept_parity(row.features, k) ^ flip;
    }
    row.label = rng.bernoulli(oracle.predict_positive(row.concepts)) ? 1 : 0;
  }
  return data;
}

ConceptProbs oracle_concept_probs(std::span<const double> x, double noise) {
  require(noise >= 0.0 && noise <= 1.0, "noise must lie in [0, 1]");
  std::vector<double> q(kNumConcepts);
  for (std::size_t k = 0; k < kNumConcepts; ++k) q[k] = concept_parity(x, k) ? 1.0 - noise : noise;
  return ConceptProbs(std::move(q));
}

FrontEndModel oracle_frontend() { return FrontEndModel::logistic({1.0, 2.0, 3.0}, -2.0); }

void write_csv(std::ostream& os, const Dataset& data) {
  require(data.num_features == kNumFeatures && data.num_concepts == kNumConcepts,
          "not a synthetic dataset");
  os << kHeader << '\n';
  for (const auto& row : data.rows) {
    for (double v : row.features) os << static_cast<int>(v) << ',';
    for (auto c : row.concepts) os << static_cast<int>(c) << ',';
    os << row.label << '\n';
  }
}

void write_file(const std::string& path, const Dataset& data) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path);
  write_csv(os, data);
  if (!os) fail(ErrorCode::kIo, "write failed: " + path);
}

Dataset read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader) fail(ErrorCode::kParse, "bad synthetic header");
  Dataset data;
  data.num_features = kNumFeatures;
  data.num_concepts = kNumConcepts;
  std::size_t row_no = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++row_no;
    std::istringstream ls(line);
    std::string cell;
    std::vector<int> v;
    while (std::getline(ls, cell, ',')) {
      if (cell != "0" && cell != "1") fail(ErrorCode::kParse, "row " + std::to_string(row_no) + ": expected 0 or 1");
      v.push_back(cell == "1");
    }
    if (v.size() != 9) fail(ErrorCode::kParse, "row " + std::to_string(row_no) + ": expected 9 fields");
    Instance row;
    row.id = data.rows.size();
    for (int j = 0; j < 5; ++j) row.features.push_back(v[j]);
    for (int j = 5; j < 8; ++j) row.concepts.push_back(static_cast<std::uint8_t>(v[j]));
    row.label = v[8];
    data.rows.push_back(std::move(row));
  }
  return data;
}

Dataset read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot read " + path);
  return read_csv(is);
}

}  // namespace safeguard::synthetic
