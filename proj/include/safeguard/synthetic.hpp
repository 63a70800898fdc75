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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "safeguard/frontend.hpp"
#include "safeguard/types.hpp"

namespace safeguard::synthetic {

/// noisyconcepts generator settings. noise is the concept flip rate.
struct Config {
  std::size_t n = 1000;
  double noise = 0.25;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kNumFeatures = 5;
inline constexpr std::size_t kNumConcepts = 3;
inline constexpr double kFeatureRate = 0.7;

/// Feature triples (0-based) whose parity drives c1, c2, c3.
inline constexpr std::array<std::array<std::size_t, 3>, kNumConcepts> kParityTriples{
    {{0, 1, 3}, {0, 1, 2}, {0, 1, 4}}};

/// Parity of concept k's feature triple.
std::uint8_t concept_parity(std::span<const double> x, std::size_t k);

/// Row i is drawn from Rng::substream(seed, i) in this order: x1..x5,
/// xi1..xi3, y. Ids equal row indices.
Dataset generate(const Config& config);

/// Bayes-optimal detector: 1 - noise where the parity is 1, noise otherwise.
ConceptProbs oracle_concept_probs(std::span<const double> x, double noise);

/// logistic(1 c1 + 2 c2 + 3 c3 - 2).
FrontEndModel oracle_frontend();

/// Header `x1,x2,x3,x4,x5,c1,c2,c3,y`, integer fields.
void write_csv(std::ostream& os, const Dataset& data);
void write_file(const std::string& path, const Dataset& data);
Dataset read_csv(std::istream& is);
Dataset read_file(const std::string& path);

}  // namespace safeguard::synthetic
