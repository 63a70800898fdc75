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

#include "safeguard/propagation.hpp"

#include <string>

#include "safeguard/error.hpp"
#include "safeguard/rng.hpp"

namespace safeguard {
namespace {

struct Collapsed {
  HardConcepts base;                 // confirmed entries set, uncertain entries 0
  std::vector<std::size_t> uncertain;
};

Collapsed collapse(const FrontEndModel& model, std::span<const double> p) {
  require(p.size() == model.num_concepts(), "concept dimension mismatch");
  check_probabilities(p);
  Collapsed out{HardConcepts(p.size(), 0), {}};
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 1.0) {
      out.base[k] = 1;
    } else if (p[k] != 0.0) {
      out.uncertain.push_back(k);
    }
  }
  return out;
}

}  // namespace

std::vector<double> propagate_exact(const FrontEndModel& model, std::span<const double> p,
                                    std::size_t exact_limit) {
  auto [base, uncertain] = collapse(model, p);
  if (uncertain.size() > exact_limit) {
    fail(ErrorCode::kLimitExceeded, std::to_string(uncertain.size()) +
                                        " uncertain concepts exceed the exact limit; use monte-carlo mode");
  }
  std::vector<double> out(model.num_classes(), 0.0);
  if (uncertain.empty()) {
    model.accumulate(base, 1.0, out);
    return out;
  }

  // Corner weights and corner codes are built by doubling: after processing
  // uncertain entry j, slot s holds the corner whose bit j is (s >> j) & 1.
  const std::size_t corners = std::size_t{1} << uncertain.size();
  std::vector<double> weight(corners);
  weight[0] = 1.0;
  if (model.kind() == FrontEndModel::Kind::kLogistic) {
    const auto w = model.weights();
    std::vector<double> z(corners);
    z[0] = model.intercept();
    for (std::size_t k = 0; k < base.size(); ++k) {
      if (base[k]) z[0] += w[k];
    }
    std::size_t filled = 1;
    for (std::size_t k : uncertain) {
      const double pk = p[k];
      for (std::size_t s = 0; s < filled; ++s) {
        weight[s + filled] = weight[s] * pk;
        weight[s] *= 1.0 - pk;
        z[s + filled] = z[s] + w[k];
      }
      filled *= 2;
    }
    double positive = 0.0;
    double negative = 0.0;
    for (std::size_t s = 0; s < corners; ++s) {
      const double f = logistic(z[s]);
      positive += weight[s] * f;
      negative += weight[s] * (1.0 - f);
    }
    out[0] = negative;
    out[1] = positive;
    return out;
  }

  std::vector<std::size_t> code(corners);
  code[0] = FrontEndModel::concept_index(base);
  std::size_t filled = 1;
  for (std::size_t k : uncertain) {
    const double pk = p[k];
    for (std::size_t s = 0; s < filled; ++s) {
      weight[s + filled] = weight[s] * pk;
      weight[s] *= 1.0 - pk;
      code[s + filled] = code[s] | (std::size_t{1} << k);
    }
    filled *= 2;
  }
  const auto table = model.table();
  const auto n_classes = static_cast<std::size_t>(model.num_classes());
  for (std::size_t s = 0; s < corners; ++s) {
    const double* row = table.data() + code[s] * n_classes;
    for (std::size_t y = 0; y < n_classes; ++y) out[y] += weight[s] * row[y];
  }
  return out;
}

std::vector<double> propagate_mc(const FrontEndModel& model, std::span<const double> p,
                                 const PropagationConfig& config) {
  require(config.mc_samples >= 1, "mc_samples must be at least 1");
  auto [base, uncertain] = collapse(model, p);
  std::vector<double> out(model.num_classes(), 0.0);
  if (uncertain.empty()) {
    model.accumulate(base, 1.0, out);
    return out;
  }
  Rng rng(config.seed);
  HardConcepts c = base;
  for (std::uint64_t s = 0; s < config.mc_samples; ++s) {
    for (std::size_t k : uncertain) c[k] = rng.bernoulli(p[k]) ? 1 : 0;
    model.accumulate(c, 1.0, out);
  }
  const double n = static_cast<double>(config.mc_samples);
  for (double& v : out) v /= n;
  return out;
}

std::vector<double> propagate(const FrontEndModel& model, std::span<const double> p,
                              const PropagationConfig& config) {
  if (config.mode == PropagationConfig::Mode::kMonteCarlo) return propagate_mc(model, p, config);
  return propagate_exact(model, p, config.exact_limit);
}

double propagate_positive(const FrontEndModel& model, std::span<const double> p,
                          std::size_t exact_limit) {
  require(model.num_classes() == 2, "propagate_positive needs a binary model");
  return propagate_exact(model, p, exact_limit)[1];
}

}  // namespace safeguard
