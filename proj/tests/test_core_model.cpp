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
#include <functional>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "safeguard/error.hpp"
#include "safeguard/frontend.hpp"
#include "safeguard/rng.hpp"
#include "safeguard/synthetic.hpp"
#include "safeguard/types.hpp"

using namespace safeguard;

namespace {

std::vector<ConceptLabelPair> repeat(HardConcepts c, int y, int times) {
  return std::vector<ConceptLabelPair>(static_cast<std::size_t>(times), ConceptLabelPair{std::move(c), y});
}

std::string error_text(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("core-model") {
  TEST_CASE("logistic predictions at the corners of the generating model") {
    const auto f = FrontEndModel::logistic({1, 2, 3}, -2);
    CHECK(f.predict_positive(HardConcepts{1, 1, 1}) == doctest::Approx(0.98201).epsilon(1e-5));
    CHECK(f.predict_positive(HardConcepts{0, 0, 0}) == doctest::Approx(0.11920).epsilon(1e-4));
    const auto dist = f.predict(HardConcepts{1, 0, 1});
    REQUIRE(dist.size() == 2);
    CHECK(dist[1] == doctest::Approx(0.88080).epsilon(1e-5));
    CHECK(dist[0] + dist[1] == doctest::Approx(1.0));
  }

  TEST_CASE("predict rejects non-binary concepts") {
    const auto f = FrontEndModel::logistic({1, 2}, 0);
    CHECK(error_text([&] { f.predict(HardConcepts{1, 2}); }).find("hard concepts required") != std::string::npos);
    CHECK_THROWS_AS(f.predict(HardConcepts{1}), Error);
  }

  TEST_CASE("tabular lookup returns the stored row") {
    // Row index has bit k set by c_k, so c = (0, 1) is row 2.
    const auto f = FrontEndModel::tabular(2, 2, {0.5, 0.5, 0.9, 0.1, 0.3, 0.7, 0.2, 0.8});
    const auto dist = f.predict(HardConcepts{0, 1});
    CHECK(dist[0] == 0.3);
    CHECK(dist[1] == 0.7);
    CHECK(FrontEndModel::concept_index(HardConcepts{1, 1}) == 3);
  }

  TEST_CASE("tabular rows must sum to one") {
    CHECK_THROWS_AS(FrontEndModel::tabular(1, 2, {0.5, 0.6, 0.5, 0.5}), Error);
    CHECK_THROWS_AS(FrontEndModel::tabular(1, 2, {0.5, 0.5}), Error);
    CHECK_NOTHROW(FrontEndModel::tabular(1, 3, {0.2, 0.3, 0.5, 1.0, 0.0, 0.0}));
  }

  TEST_CASE("separable data drives a confident logistic model") {
    std::vector<ConceptLabelPair> pairs = repeat({1}, 1, 100);
    const auto neg = repeat({0}, 0, 100);
    pairs.insert(pairs.end(), neg.begin(), neg.end());
    const auto f = train_frontend_logistic(pairs).model;
    CHECK(f.predict_positive(HardConcepts{1}) > 0.9);
    CHECK(f.predict_positive(HardConcepts{0}) < 0.1);
  }

  TEST_CASE("single-class labels are rejected") {
    const auto pairs = repeat({1, 0}, 0, 20);
    CHECK(error_text([&] { train_frontend_logistic(pairs); }) .find("degenerate labels") != std::string::npos);
    try {
      train_frontend_logistic(pairs);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerateLabels);
    }
  }

  TEST_CASE("dimension mismatch is rejected") {
    std::vector<ConceptLabelPair> pairs{{{1, 0}, 1}, {{1}, 0}};
    CHECK_THROWS_AS(train_frontend_logistic(pairs), Error);
  }

  TEST_CASE("logistic training recovers the generating parameters") {
    const auto data = synthetic::generate({100000, 0.25, 11});
    std::vector<ConceptLabelPair> pairs;
    for (const auto& r : data.rows) pairs.push_back({r.concepts, r.label});
    const auto f = train_frontend_logistic(pairs).model;
    const double truth[] = {1.0, 2.0, 3.0};
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(f.weights()[k] - truth[k]) < 0.1);
    CHECK(std::abs(f.intercept() + 2.0) < 0.1);
  }

  TEST_CASE("logistic loss never increases at the clamped learning rate") {
    Rng rng(5);
    std::vector<ConceptLabelPair> pairs;
    for (int i = 0; i < 500; ++i) {
      HardConcepts c{static_cast<std::uint8_t>(rng.bernoulli(0.5)), static_cast<std::uint8_t>(rng.bernoulli(0.3)),
                     static_cast<std::uint8_t>(rng.bernoulli(0.6))};
      const int y = rng.bernoulli(logistic(2.0 * c[0] - c[1] + 0.5 * c[2] - 0.3));
      pairs.push_back({c, y});
    }
    LogisticTrainConfig cfg;
    cfg.learning_rate = 100.0;  // clamped
    cfg.epochs = 300;
    const auto result = train_frontend_logistic(pairs, cfg);
    CHECK(result.learning_rate <= logistic_stability_bound(pairs, cfg.l2));
    REQUIRE(result.epoch_losses.size() == 301);
    for (std::size_t e = 1; e < result.epoch_losses.size(); ++e) {
      CHECK(result.epoch_losses[e] <= result.epoch_losses[e - 1] + 1e-9);
    }
  }

  TEST_CASE("training is deterministic") {
    const auto data = synthetic::generate({2000, 0.25, 3});
    std::vector<ConceptLabelPair> pairs;
    for (const auto& r : data.rows) pairs.push_back({r.concepts, r.label});
    const auto a = train_frontend_logistic(pairs).model;
    const auto b = train_frontend_logistic(pairs).model;
    for (std::size_t k = 0; k < 3; ++k) CHECK(a.weights()[k] == b.weights()[k]);
    CHECK(a.intercept() == b.intercept());
  }

  TEST_CASE("tabular training: frequencies, Laplace smoothing, uniform fallback") {
    auto pairs = repeat({0}, 0, 9);
    pairs.push_back({{0}, 1});
    const auto raw = train_frontend_tabular(pairs, 2, 0.0);
    CHECK(raw.predict(HardConcepts{0})[1] == doctest::Approx(0.1).epsilon(1e-15));
    const auto unseen = train_frontend_tabular(pairs, 2, 1.0);
    CHECK(unseen.predict(HardConcepts{1})[0] == 0.5);
    CHECK(unseen.predict(HardConcepts{1})[1] == 0.5);
    const auto laplace = train_frontend_tabular(repeat({1}, 1, 3), 2, 1.0);
    CHECK(laplace.predict(HardConcepts{1})[1] == doctest::Approx(0.8).epsilon(1e-15));
  }

  TEST_CASE("tabular training refuses more than 20 concepts") {
    const auto pairs = repeat(HardConcepts(21, 0), 0, 2);
    CHECK(error_text([&] { train_frontend_tabular(pairs, 2); }).find("table too large") != std::string::npos);
  }

  TEST_CASE("predictions stay in range and multiclass rows sum to one") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      const auto f = FrontEndModel::logistic({rng.normal() * 20, rng.normal() * 20}, rng.normal() * 20);
      for (std::uint8_t a = 0; a < 2; ++a) {
        for (std::uint8_t b = 0; b < 2; ++b) {
          const double p = f.predict_positive(HardConcepts{a, b});
          CHECK(p >= 0.0);
          CHECK(p <= 1.0);
        }
      }
    }
    std::vector<ConceptLabelPair> pairs;
    for (int i = 0; i < 300; ++i) {
      pairs.push_back({{static_cast<std::uint8_t>(rng.bernoulli(0.5)), static_cast<std::uint8_t>(rng.bernoulli(0.5))},
                       static_cast<int>(rng.below(3))});
    }
    const auto tab = train_frontend_tabular(pairs, 3);
    for (std::size_t row = 0; row < 4; ++row) {
      double sum = 0;
      for (int y = 0; y < 3; ++y) sum += tab.table()[row * 3 + static_cast<std::size_t>(y)];
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("serialization round-trip is bit-exact") {
    Rng rng(21);
    const auto f = FrontEndModel::logistic({rng.normal(), rng.normal() / 3, 1e-300, -7.25}, rng.normal());
    std::stringstream ss;
    f.save(ss);
    CHECK(ss.str().rfind("frontend v1 kind=logistic m=4\n", 0) == 0);
    const auto g = FrontEndModel::load(ss);
    for (std::size_t k = 0; k < 4; ++k) CHECK(f.weights()[k] == g.weights()[k]);
    CHECK(f.intercept() == g.intercept());

    const auto t = FrontEndModel::tabular(1, 3, {0.1, 0.2, 0.7, 1.0 / 3, 1.0 / 3, 1.0 / 3});
    std::stringstream ts;
    t.save(ts);
    const auto u = FrontEndModel::load(ts);
    REQUIRE(u.table().size() == t.table().size());
    for (std::size_t i = 0; i < t.table().size(); ++i) CHECK(u.table()[i] == t.table()[i]);
    CHECK(u.num_classes() == 3);
  }

  TEST_CASE("malformed model files are rejected") {
    std::stringstream bad("frontend v2 kind=logistic m=1\n1\n0\n");
    CHECK_THROWS_AS(FrontEndModel::load(bad), Error);
    std::stringstream short_file("frontend v1 kind=logistic m=2\n1\n");
    CHECK_THROWS_AS(FrontEndModel::load(short_file), Error);
  }

  TEST_CASE("domain type invariants") {
    CHECK_THROWS_AS(ConceptProbs({0.5, 1.2}), Error);
    CHECK_THROWS_AS(ConceptProbs({-0.1}), Error);
    PartiallyConfirmed p(ConceptProbs({0.4, 0.9}));
    p.confirm(0, 1);
    CHECK(p[0] == 1.0);
    CHECK(p.is_confirmed(0));
    CHECK_FALSE(p.is_confirmed(1));
    CHECK_THROWS_AS(p.confirm(2, 0), Error);
    CHECK_THROWS_AS(p.confirm(1, 2), Error);
    CHECK(GateDecision::abstain().abstained());
    CHECK(GateDecision::predict(1).label() == 1);
    CHECK_FALSE(GateDecision::abstain() == GateDecision::predict(0));
  }
}
