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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "safeguard/error.hpp"
#include "safeguard/propagation.hpp"
#include "safeguard/rng.hpp"

using namespace safeguard;

namespace {

PropagationConfig mc(std::uint64_t samples, std::uint64_t seed) {
  PropagationConfig cfg;
  cfg.mode = PropagationConfig::Mode::kMonteCarlo;
  cfg.mc_samples = samples;
  cfg.seed = seed;
  return cfg;
}

// Random p with some entries pinned to 0 or 1.
std::vector<double> random_p(Rng& rng, std::size_t m) {
  std::vector<double> p(m);
  for (auto& v : p) {
    const double u = rng.uniform();
    v = u < 0.1 ? 0.0 : u < 0.2 ? 1.0 : rng.uniform();
  }
  return p;
}

}  // namespace

TEST_SUITE("propagation") {
  TEST_CASE("reference value for the generating model at p = 0.5") {
    const auto f = FrontEndModel::logistic({1, 2, 3}, -2);
    const double p[] = {0.5, 0.5, 0.5};
    double expected = 0;
    for (double z : {-2, -1, 0, 1, 1, 2, 3, 4}) expected += oracle::sigmoid(z) / 8;
    CHECK(std::abs(propagate_positive(f, p) - expected) < 1e-12);
    CHECK(propagate_positive(f, p) == doctest::Approx(0.6457).epsilon(1e-4));
  }

  TEST_CASE("hard p reproduces frontend_predict exactly") {
    const auto f = FrontEndModel::logistic({0.3, -1.7, 2.2}, 0.4);
    const double p[] = {1.0, 0.0, 1.0};
    CHECK(propagate_exact(f, p)[1] == f.predict_positive(HardConcepts{1, 0, 1}));
    for (std::uint64_t s : {1ULL, 7ULL, 1000ULL}) CHECK(propagate_mc(f, p, mc(s, 3))[1] == f.predict_positive(HardConcepts{1, 0, 1}));
  }

  TEST_CASE("one concept is a two-point mixture") {
    const auto f = FrontEndModel::logistic({1.5}, -0.5);
    const double p[] = {0.3};
    const double expected = 0.3 * f.predict_positive(HardConcepts{1}) + 0.7 * f.predict_positive(HardConcepts{0});
    CHECK(std::abs(propagate_positive(f, p) - expected) < 1e-15);
  }

  TEST_CASE("exact propagation matches the brute-force oracle") {
    Rng rng(101);
    for (int t = 0; t < 300; ++t) {
      const std::size_t m = 1 + rng.below(10);
      std::vector<double> w(m);
      for (auto& v : w) v = rng.normal() * 2;
      const double b = rng.normal();
      const auto p = random_p(rng, m);
      const auto f = FrontEndModel::logistic(w, b);
      const auto dist = propagate_exact(f, p);
      CHECK(std::abs(dist[1] - oracle::brute_force_propagate(w, b, p)) < 1e-12);
      CHECK(std::abs(dist[0] + dist[1] - 1.0) < 1e-12);
    }
  }

  TEST_CASE("multiclass propagation matches the brute-force oracle") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
      const std::size_t m = 1 + rng.below(6);
      const int classes = 3;
      std::vector<double> rows;
      for (std::size_t r = 0; r < (std::size_t{1} << m); ++r) {
        double a = rng.uniform() + 1e-3, b = rng.uniform() + 1e-3, c = rng.uniform() + 1e-3;
        const double s = a + b + c;
        a /= s;
        b /= s;
        rows.insert(rows.end(), {a, b, 1.0 - a - b});
      }
      const auto f = FrontEndModel::tabular(m, classes, rows);
      const auto p = random_p(rng, m);
      const auto got = propagate_exact(f, p);
      const auto want = oracle::brute_force_table(rows, classes, p);
      for (int y = 0; y < classes; ++y) CHECK(std::abs(got[static_cast<std::size_t>(y)] - want[static_cast<std::size_t>(y)]) < 1e-12);
    }
  }

  TEST_CASE("exact mode refuses too many uncertain concepts") {
    const auto f = FrontEndModel::logistic(std::vector<double>(25, 0.1), 0);
    std::vector<double> p(25, 0.5);
    try {
      propagate_exact(f, p);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kLimitExceeded);
      CHECK(std::string(e.what()).find("use monte-carlo mode") != std::string::npos);
    }
    // Confirmed entries collapse before the limit applies.
    for (std::size_t k = 0; k < 6; ++k) p[k] = 1.0;
    CHECK_NOTHROW(propagate_exact(f, p));
    CHECK_THROWS_AS(propagate_exact(f, p, 10), Error);
  }

  TEST_CASE("monotone in p_k when w_k > 0") {
    Rng rng(55);
    for (int t = 0; t < 50; ++t) {
      const std::size_t m = 2 + rng.below(5);
      std::vector<double> w(m);
      for (auto& v : w) v = rng.normal();
      w[0] = std::abs(w[0]) + 0.1;
      const auto f = FrontEndModel::logistic(w, rng.normal());
      auto p = random_p(rng, m);
      double prev = -1;
      for (int i = 0; i <= 20; ++i) {
        p[0] = i / 20.0;
        const double y = propagate_positive(f, p);
        CHECK(y > prev);
        prev = y;
      }
    }
  }

  TEST_CASE("Monte Carlo is close to exact and deterministic") {
    const auto f = FrontEndModel::logistic({1, 2, 3}, -2);
    const double p[] = {0.5, 0.5, 0.5};
    const auto a = propagate_mc(f, p, mc(100000, 42));
    CHECK(std::abs(a[1] - propagate_positive(f, p)) < 0.01);
    const auto b = propagate_mc(f, p, mc(100000, 42));
    CHECK(a[1] == b[1]);
    CHECK(propagate(f, p, mc(100000, 42))[1] == a[1]);
    CHECK(propagate(f, p, PropagationConfig{})[1] == propagate_positive(f, p));
  }

  TEST_CASE("Monte Carlo error shrinks as one over root n") {
    const auto f = FrontEndModel::logistic({1, 2, 3}, -2);
    const double p[] = {0.4, 0.6, 0.5};
    auto spread = [&](std::uint64_t n) {
      double s = 0, s2 = 0;
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const double v = propagate_mc(f, p, mc(n, seed))[1];
        s += v;
        s2 += v * v;
      }
      return std::sqrt((s2 - s * s / 30) / 29);
    };
    const double ratio = spread(100) / spread(10000);
    CHECK(ratio > 5.0);
    CHECK(ratio < 20.0);
  }

  TEST_CASE("zero samples are rejected") {
    const auto f = FrontEndModel::logistic({1}, 0);
    const double p[] = {0.5};
    CHECK_THROWS_AS(propagate_mc(f, p, mc(0, 1)), Error);
    const double bad[] = {1.5};
    CHECK_THROWS_AS(propagate_exact(f, bad), Error);
  }
}
