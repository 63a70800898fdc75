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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "safeguard/error.hpp"
#include "safeguard/experiment.hpp"
#include "test_util.hpp"

using namespace safeguard;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.synthetic = {3000, 0.25, seed};
  cfg.seed = seed;
  cfg.methods = {Method::kBaseline, Method::kCs, Method::kBaselineRandomConf, Method::kCsRandomConf,
                 Method::kCsImpactConf};
  cfg.budgets = {0.0, 0.2, 1.0};
  cfg.tau_grid = default_tau_grid(0.05);
  cfg.detector.epochs = 10;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("split is a sorted partition with the requested sizes") {
    const auto s = make_split(1000, 0.6, 0.2, 4);
    CHECK(s.train.size() == 600);
    CHECK(s.calibration.size() == 200);
    CHECK(s.test.size() == 200);
    std::set<std::size_t> all;
    for (const auto* part : {&s.train, &s.calibration, &s.test}) {
      CHECK(std::is_sorted(part->begin(), part->end()));
      all.insert(part->begin(), part->end());
    }
    CHECK(all.size() == 1000);
    const auto t = make_split(1000, 0.6, 0.2, 4);
    CHECK(t.test == s.test);
  }

  TEST_CASE("config parsing") {
    std::istringstream is(
        "# comment\nsource = synthetic\nn = 500\nnoise = 0.75  # trailing\nmethods = cs, cs+impactconf\n"
        "budgets = 0, 0.5\ntau_grid = 0.02, 0.3\nsplit = 0.5, 0.25, 0.25\nseed = 3\noracle = true\n"
        "detector.hidden = 8\nxy.epochs = 4\nfrontend.l2 = 0.01\npropagation = monte-carlo\nmc_samples = 50\n");
    const auto cfg = parse_config(is);
    CHECK(cfg.synthetic.n == 500);
    CHECK(cfg.synthetic.noise == 0.75);
    CHECK(cfg.methods == std::vector<Method>{Method::kCs, Method::kCsImpactConf});
    CHECK(cfg.budgets == std::vector<double>{0.0, 0.5});
    // Table thresholds are always part of the grid.
    for (double t : table_taus()) CHECK(std::find(cfg.tau_grid.begin(), cfg.tau_grid.end(), t) != cfg.tau_grid.end());
    CHECK(std::is_sorted(cfg.tau_grid.begin(), cfg.tau_grid.end()));
    CHECK(cfg.train_fraction == 0.5);
    CHECK(cfg.oracle);
    CHECK(cfg.detector.hidden == 8);
    CHECK(cfg.xy_mlp.epochs == 4);
    CHECK(cfg.frontend.l2 == 0.01);
    CHECK(cfg.propagation.mode == PropagationConfig::Mode::kMonteCarlo);
    CHECK(cfg.propagation.mc_samples == 50);
  }

  TEST_CASE("config errors") {
    for (const char* text : {"bogus = 1\n", "split = 0.5, 0.5, 0.5\n", "budgets = 0, 1.5\n", "methods = magic\n",
                             "n = -3\n", "no equals sign\n", "tau_grid = 0.6\n"}) {
      std::istringstream is(text);
      CHECK_THROWS_AS(parse_config(is), Error);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config"), Error);
  }

  TEST_CASE("xy-mlp is unavailable for probability tables") {
    ExperimentConfig cfg;
    cfg.source = ExperimentConfig::Source::kTable;
    cfg.table_path = "unused.csv";
    cfg.methods = {Method::kXyMlp};
    try {
      cfg.validate();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("xy-mlp") != std::string::npos);
    }
  }

  TEST_CASE("budget 0 curves coincide and confirmation never lowers coverage") {
    const auto result = run_experiment(small_config(5));
    auto same = [&](Method a, Method b) {
      const auto& x = result.curves.at({a, 0.0});
      const auto& y = result.curves.at({b, 0.0});
      REQUIRE(x.size() == y.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].n_covered == y[i].n_covered);
        CHECK(x[i].selective_accuracy == y[i].selective_accuracy);
      }
    };
    same(Method::kBaseline, Method::kBaselineRandomConf);
    same(Method::kCsRandomConf, Method::kCsImpactConf);
    same(Method::kCs, Method::kCsRandomConf);
    for (Method m : {Method::kBaselineRandomConf, Method::kCsRandomConf, Method::kCsImpactConf}) {
      const auto& zero = result.curves.at({m, 0.0});
      const auto& full = result.curves.at({m, 1.0});
      for (std::size_t i = 0; i < zero.size(); ++i) CHECK(full[i].n_covered >= zero[i].n_covered);
    }
    // Every requested combination is present.
    CHECK(result.curves.size() == 5 * 3);
  }

  TEST_CASE("oracle mode meets the selective accuracy guarantee") {
    ExperimentConfig cfg;
    cfg.synthetic = {50000, 0.25, 8};
    cfg.seed = 8;
    cfg.oracle = true;
    cfg.methods = {Method::kCs};
    cfg.budgets = {0.0};
    cfg.tau_grid = default_tau_grid(0.01);
    const auto result = run_experiment(cfg);
    for (const auto& pt : result.curves.at({Method::kCs, 0.0})) {
      if (pt.n_covered == 0) continue;
      const double bound = 1 - pt.tau - 3 * std::sqrt(pt.tau * (1 - pt.tau) / static_cast<double>(pt.n_covered));
      CHECK(pt.selective_accuracy.value() >= bound);
    }
  }

  TEST_CASE("test rows never reach training or calibration") {
    const auto result = run_experiment(small_config(6));
    std::set<std::size_t> fit(result.split.train.begin(), result.split.train.end());
    fit.insert(result.split.calibration.begin(), result.split.calibration.end());
    for (std::size_t i : result.split.test) CHECK(fit.count(i) == 0);
    for (const auto& row : result.test_table.rows) CHECK(std::binary_search(result.split.test.begin(), result.split.test.end(), row.id));
  }

  TEST_CASE("reports: files, determinism and table echo") {
    const TempDir dir;
    auto cfg = small_config(7);
    cfg.budgets = {0.0, 0.2};
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    emit_reports(a, dir.path / "a");
    emit_reports(b, dir.path / "b");
    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir.path / "a")) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const auto rel = fs::relative(entry.path(), dir.path / "a");
      CHECK(read_all(entry.path()) == read_all(dir.path / "b" / rel));
    }
    // Curves, coverage tables, manifest, model, test table, and one plan per
    // confirming method at each table threshold.
    CHECK(files == 5 * 2 + 2 + 3 + 3 * 4);

    // Coverage table rows equal the in-memory curve points.
    std::istringstream table(read_all(dir.path / "a" / "coverage_b0.2.csv"));
    std::string line;
    std::getline(table, line);
    CHECK(line == "tau,baseline,cs,baseline+randomconf,cs+randomconf,cs+impactconf");
    for (double tau : table_taus()) {
      REQUIRE(std::getline(table, line));
      std::istringstream row(line);
      std::string cell;
      std::getline(row, cell, ',');
      CHECK(std::stod(cell) == doctest::Approx(tau));
      for (Method m : cfg.methods) {
        std::getline(row, cell, ',');
        const auto& curve = a.curves.at({m, 0.2});
        const auto it = std::find_if(curve.begin(), curve.end(), [&](const CurvePoint& p) { return p.tau == tau; });
        REQUIRE(it != curve.end());
        CHECK(std::abs(std::stod(cell) - it->coverage) <= 5e-7);
      }
    }
    std::istringstream curve_file(read_all(dir.path / "a" / "curves" / "cs+impactconf_b0.2.csv"));
    const auto curve = read_curve_csv(curve_file);
    const auto& mem = a.curves.at({Method::kCsImpactConf, 0.2});
    REQUIRE(curve.size() == mem.size());
    for (std::size_t i = 0; i < curve.size(); ++i) CHECK(curve[i].n_covered == mem[i].n_covered);

    // Plan files round-trip, use table ids and spend exactly the normalized budget.
    std::set<InstanceId> table_ids;
    for (const auto& row : a.test_table.rows) table_ids.insert(row.id);
    const std::size_t m = a.test_table.num_concepts;
    for (Method meth : {Method::kCsRandomConf, Method::kCsImpactConf}) {
      for (double tau : table_taus()) {
        const auto& mem_plan = a.plans.at({meth, 0.2, tau});
        char name[96];
        std::snprintf(name, sizeof name, "%s_b0.2_tau%g.csv", method_name(meth).c_str(), tau);
        std::istringstream plan_file(read_all(dir.path / "a" / "plans" / name));
        const auto plan = read_plan_csv(plan_file);
        REQUIRE(plan.selections.size() == mem_plan.selections.size());
        for (std::size_t i = 0; i < plan.selections.size(); ++i) {
          CHECK(plan.selections[i].instance == mem_plan.selections[i].instance);
          CHECK(plan.selections[i].concept_index == mem_plan.selections[i].concept_index);
          CHECK(table_ids.count(plan.selections[i].instance) == 1);
        }
        const auto& base = a.curves.at({Method::kCs, 0.0});
        const auto it = std::find_if(base.begin(), base.end(), [&](const CurvePoint& p) { return p.tau == tau; });
        REQUIRE(it != base.end());
        const double abstained = static_cast<double>(a.test_table.rows.size() - it->n_covered);
        CHECK(plan.selections.size() == static_cast<std::size_t>(std::floor(0.2 * abstained * static_cast<double>(m) + 1e-9)));
      }
    }

    const auto manifest = nlohmann::json::parse(read_all(dir.path / "a" / "manifest.json"));
    CHECK(manifest.at("notes").contains("budget_normalization"));
    CHECK(manifest.at("notes").contains("baseline_concepts"));
    CHECK(manifest.at("config").at("seed") == 7);
  }

  TEST_CASE("empty method list writes the manifest only") {
    const TempDir dir;
    auto cfg = small_config(9);
    cfg.methods.clear();
    emit_reports(run_experiment(cfg), dir.path.string());
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir.path)) names.push_back(e.path().filename().string());
    CHECK(names == std::vector<std::string>{"manifest.json"});
  }

  TEST_CASE("unwritable output directory is an error") {
    const TempDir dir;
    std::ofstream(dir.path / "blocker") << "x";
    auto cfg = small_config(10);
    cfg.methods = {Method::kCs};
    cfg.budgets = {0.0};
    CHECK_THROWS_AS(emit_reports(run_experiment(cfg), (dir.path / "blocker" / "out").string()), Error);
  }

  TEST_CASE("probability table source") {
    const TempDir dir;
    const auto data = synthetic::generate({2000, 0.25, 11});
    ProbabilityTable t;
    t.num_concepts = 3;
    t.has_concepts = true;
    for (const auto& r : data.rows) {
      const auto q = synthetic::oracle_concept_probs(r.features, 0.25);
      t.rows.push_back({r.id, {q.values().begin(), q.values().end()}, r.concepts, r.label});
    }
    {
      std::ofstream os(dir.path / "table.csv");
      write_probability_table(os, t);
    }
    ExperimentConfig cfg;
    cfg.source = ExperimentConfig::Source::kTable;
    cfg.table_path = (dir.path / "table.csv").string();
    cfg.methods = {Method::kBaseline, Method::kCsImpactConf};
    cfg.budgets = {0.0, 0.5};
    const auto result = run_experiment(cfg);
    CHECK(result.curves.size() == 4);
    CHECK(result.frontend.has_value());
  }
}
