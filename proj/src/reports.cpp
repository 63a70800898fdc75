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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "safeguard/error.hpp"
#include "safeguard/experiment.hpp"

namespace safeguard {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string budget_label(double b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", b);
  return buf;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot write " + path.string());
  return os;
}

ordered_json mlp_json(const MlpConfig& c) {
  return {{"hidden", c.hidden}, {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"batch_size", c.batch_size}};
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  if (c.source == ExperimentConfig::Source::kSynthetic) {
    j["source"] = "synthetic";
    j["n"] = c.synthetic.n;
    j["noise"] = c.synthetic.noise;
    j["data_seed"] = c.synthetic.seed;
  } else {
    j["source"] = "table";
    j["table"] = c.table_path;
  }
  ordered_json methods = ordered_json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["budgets"] = c.budgets;
  j["tau_grid"] = c.tau_grid;
  j["split"] = {c.train_fraction, c.calibration_fraction, c.test_fraction};
  j["seed"] = c.seed;
  j["oracle"] = c.oracle;
  j["calibrate_detectors"] = c.calibrate_detectors;
  j["faithful_alg1"] = c.faithful_alg1;
  j["detector"] = mlp_json(c.detector);
  j["xy"] = mlp_json(c.xy_mlp);
  j["frontend"] = {{"learning_rate", c.frontend.learning_rate}, {"epochs", c.frontend.epochs}, {"l2", c.frontend.l2}};
  j["propagation"] = {{"mode", c.propagation.mode == PropagationConfig::Mode::kExact ? "exact" : "monte-carlo"},
                      {"mc_samples", c.propagation.mc_samples},
                      {"exact_limit", c.propagation.exact_limit}};
  return j;
}

const CurvePoint* find_point(const std::vector<CurvePoint>& curve, double tau) {
  for (const auto& pt : curve) {
    if (std::abs(pt.tau - tau) <= 1e-12) return &pt;
  }
  return nullptr;
}

}  // namespace

void emit_reports(const ExperimentResult& result, const std::string& out_dir) {
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + out_dir + ": " + ec.message());

  const auto& cfg = result.config;
  ordered_json files = ordered_json::array();
  ordered_json curves = ordered_json::array();

  if (!cfg.methods.empty()) {
    fs::create_directories(root / "curves", ec);
    if (ec) fail(ErrorCode::kIo, "cannot create curves directory: " + ec.message());
    for (const auto& [key, curve] : result.curves) {
      const std::string rel = "curves/" + method_name(key.method) + "_b" + budget_label(key.budget) + ".csv";
      auto os = open_out(root / rel);
      write_curve_csv(os, curve);
      files.push_back(rel);
      curves.push_back({{"method", method_name(key.method)}, {"budget", key.budget}, {"file", rel}});
    }

    for (double b : cfg.budgets) {
      const std::string rel = "coverage_b" + budget_label(b) + ".csv";
      auto os = open_out(root / rel);
      os << "tau";
      for (Method m : cfg.methods) os << ',' << method_name(m);
      os << '\n';
      for (double tau : table_taus()) {
        os << fixed6(tau);
        for (Method m : cfg.methods) {
          const auto it = result.curves.find({m, b});
          const CurvePoint* pt = it == result.curves.end() ? nullptr : find_point(it->second, tau);
          os << ',' << (pt ? fixed6(pt->coverage) : std::string("NA"));
        }
        os << '\n';
      }
      files.push_back(rel);
    }

    if (!result.plans.empty()) {
      fs::create_directories(root / "plans", ec);
      if (ec) fail(ErrorCode::kIo, "cannot create plans directory: " + ec.message());
      for (const auto& [key, plan] : result.plans) {
        const std::string rel = "plans/" + method_name(key.method) + "_b" + budget_label(key.budget) + "_tau" +
                                budget_label(key.tau) + ".csv";
        auto os = open_out(root / rel);
        write_plan_csv(os, plan);
        files.push_back(rel);
      }
    }

    if (result.frontend) {
      result.frontend->save_file((root / "frontend.model").string());
      files.push_back("frontend.model");
      auto os = open_out(root / "test_table.csv");
      write_probability_table(os, result.test_table);
      files.push_back("test_table.csv");
    }
  }

  ordered_json manifest;
  manifest["format"] = "safeguard-run v1";
  manifest["config"] = config_json(cfg);
  manifest["split"] = {{"train", result.split.train.size()},
                       {"calibration", result.split.calibration.size()},
                       {"test", result.split.test.size()}};
  ordered_json metrics = ordered_json::object();
  for (const auto& [k, v] : result.metrics) metrics[k] = v;
  manifest["metrics"] = metrics;
  ordered_json notes = ordered_json::object();
  for (const auto& [k, v] : result.notes) notes[k] = v;
  manifest["notes"] = notes;
  manifest["curves"] = curves;
  manifest["files"] = files;
  auto os = open_out(root / "manifest.json");
  os << manifest.dump(2) << '\n';
  if (!os) fail(ErrorCode::kIo, "write failed: manifest.json");
}

}  // namespace safeguard
