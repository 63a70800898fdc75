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
#include <span>
#include <vector>

#include "safeguard/frontend.hpp"

namespace safeguard {

struct PropagationConfig {
  enum class Mode { kExact, kMonteCarlo };
  Mode mode = Mode::kExact;
  std::uint64_t mc_samples = 10000;
  std::uint64_t seed = 0;
  std::size_t exact_limit = 20;
};

/// Expected front-end output under independent Bernoulli(p_k) concepts.
///
/// Entries already at 0 or 1 are fixed before enumeration, so the cost is
/// O(2^u) in the number u of uncertain entries. Throws kLimitExceeded when u
/// exceeds exact_limit.
std::vector<double> propagate_exact(const FrontEndModel& model, std::span<const double> p,
                                    std::size_t exact_limit = 20);

/// Monte Carlo estimate from config.mc_samples hard-concept draws.
std::vector<double> propagate_mc(const FrontEndModel& model, std::span<const double> p,
                                 const PropagationConfig& config);

/// Dispatches on config.mode.
std::vector<double> propagate(const FrontEndModel& model, std::span<const double> p,
                              const PropagationConfig& config);

/// Binary convenience: propagated Pr(y = 1).
double propagate_positive(const FrontEndModel& model, std::span<const double> p,
                          std::size_t exact_limit = 20);

}  // namespace safeguard
