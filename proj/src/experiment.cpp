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

#include "safeguard/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "safeguard/confirmation.hpp"
#include "safeguard/error.hpp"
#include "safeguard/rng.hpp"

namespace safeguard {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ls(s);
  std::string item;
  while (std::getline(ls, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) fail(ErrorCode::kParse, key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    fail(ErrorCode::kParse, key + ": expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    fail(ErrorCode::kParse, key + ": integer out of range");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::kParse, key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

bool set_mlp(MlpConfig& cfg, const std::string& field, const std::string& key, const std::string& v) {
  if (field == "hidden") cfg.hidden = to_uint(key, v);
  else if (field == "learning_rate") cfg.learning_rate = to_double(key, v);
  else if (field == "epochs") cfg.epochs = static_cast<int>(to_uint(key, v));
  else if (field == "batch_size") cfg.batch_size = to_uint(key, v);
  else return false;
  return true;
}

std::vector<double> merged_grid(std::vector<double> grid) {
  for (double t : table_taus()) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double t : grid) {
    if (out.empty() || std::abs(t - out.back()) > 1e-12) out.push_back(t);
  }
  return out;
}

bool uses_concepts(Method m) { return m != Method::kXyMlp; }
bool is_cs(Method m) { return m == Method::kCs || m == Method::kCsRandomConf || m == Method::kCsImpactConf; }
bool confirms(Method m) {
  return m == Method::kBaselineRandomConf || m == Method::kCsRandomConf || m == Method::kCsImpactConf;
}

HardConcepts threshold_concepts(std::span<const double> q) {
  HardConcepts c(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) c[k] = q[k] > 0.5 ? 1 : 0;
  return c;
}

// Test-time inputs shared by every method.
struct TestSet {
  std::vector<std::vector<double>> q;
  std::vector<HardConcepts> truth;
  std::vector<int> labels;
  std::vector<InstanceId> ids;
  std::vector<double> xy_scores;  // empty unless xy-mlp ran
};

class Scorer {
 public:
  Scorer(const FrontEndModel& model, const PropagationConfig& prop) : model_(model), prop_(prop) {}

  std::vector<double> score(Method m, std::span<const double> p) const {
    if (is_cs(m)) return propagate(model_, p, prop_);
    return model_.predict(threshold_concepts(p));
  }

 private:
  const FrontEndModel& model_;
  const PropagationConfig& prop_;
};

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kXyMlp: return "xy-mlp";
    case Method::kBaseline: return "baseline";
    case Method::kCs: return "cs";
    case Method::kBaselineRandomConf: return "baseline+randomconf";
    case Method::kCsRandomConf: return "cs+randomconf";
    case Method::kCsImpactConf: return "cs+impactconf";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  fail(ErrorCode::kParse, "unknown method: " + name);
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::kXyMlp, Method::kBaseline, Method::kCs,
                                              Method::kBaselineRandomConf, Method::kCsRandomConf,
                                              Method::kCsImpactConf};
  return methods;
}

const std::vector<double>& table_taus() {
  static const std::vector<double> taus = {0.05, 0.1, 0.15, 0.2};
  return taus;
}

void ExperimentConfig::validate() const {
  require(std::abs(train_fraction + calibration_fraction + test_fraction - 1.0) <= 1e-9,
          "split fractions must sum to 1");
  require(train_fraction > 0.0 && calibration_fraction > 0.0 && test_fraction > 0.0,
          "split fractions must be positive");
  for (double b : budgets) require(b >= 0.0 && b <= 1.0, "budgets must lie in [0, 1]");
  require(!tau_grid.empty(), "tau grid is empty");
  require(std::is_sorted(tau_grid.begin(), tau_grid.end()), "tau grid must be sorted ascending");
  for (double t : tau_grid) require(t >= 0.0 && t <= 0.5, "tau values must lie in [0, 0.5]");
  if (source == Source::kTable) {
    require(!table_path.empty(), "table source needs a table path");
    require(!oracle, "oracle mode needs the synthetic source");
    for (Method m : methods) {
      if (m == Method::kXyMlp) fail(ErrorCode::kInvalidArgument, "xy-mlp requires raw features; unavailable for probability tables");
    }
  }
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));

    if (key == "source") {
      if (v == "synthetic") cfg.source = ExperimentConfig::Source::kSynthetic;
      else if (v == "table") cfg.source = ExperimentConfig::Source::kTable;
      else fail(ErrorCode::kParse, "source: expected synthetic or table");
    } else if (key == "n") {
      cfg.synthetic.n = to_uint(key, v);
    } else if (key == "noise") {
      cfg.synthetic.noise = to_double(key, v);
    } else if (key == "data_seed") {
      cfg.synthetic.seed = to_uint(key, v);
    } else if (key == "table") {
      cfg.table_path = v;
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& name : split_list(v)) cfg.methods.push_back(parse_method(name));
    } else if (key == "budgets") {
      cfg.budgets = to_doubles(key, v);
    } else if (key == "tau_grid") {
      if (v.rfind("step:", 0) == 0) cfg.tau_grid = default_tau_grid(to_double(key, v.substr(5)));
      else cfg.tau_grid = to_doubles(key, v);
    } else if (key == "split") {
      const auto parts = to_doubles(key, v);
      if (parts.size() != 3) fail(ErrorCode::kParse, "split: expected train,calibration,test");
      cfg.train_fraction = parts[0];
      cfg.calibration_fraction = parts[1];
      cfg.test_fraction = parts[2];
    } else if (key == "seed") {
      cfg.seed = to_uint(key, v);
    } else if (key == "oracle") {
      cfg.oracle = to_bool(key, v);
    } else if (key == "calibrate_detectors") {
      cfg.calibrate_detectors = to_bool(key, v);
    } else if (key == "faithful_alg1") {
      cfg.faithful_alg1 = to_bool(key, v);
    } else if (key == "propagation") {
      if (v == "exact") cfg.propagation.mode = PropagationConfig::Mode::kExact;
      else if (v == "monte-carlo") cfg.propagation.mode = PropagationConfig::Mode::kMonteCarlo;
      else fail(ErrorCode::kParse, "propagation: expected exact or monte-carlo");
    } else if (key == "mc_samples") {
      cfg.propagation.mc_samples = to_uint(key, v);
    } else if (key == "exact_limit") {
      cfg.propagation.exact_limit = to_uint(key, v);
    } else if (key == "frontend.learning_rate") {
      cfg.frontend.learning_rate = to_double(key, v);
    } else if (key == "frontend.epochs") {
      cfg.frontend.epochs = static_cast<int>(to_uint(key, v));
    } else if (key == "frontend.l2") {
      cfg.frontend.l2 = to_double(key, v);
    } else if (key.rfind("detector.", 0) == 0 && set_mlp(cfg.detector, key.substr(9), key, v)) {
    } else if (key.rfind("xy.", 0) == 0 && set_mlp(cfg.xy_mlp, key.substr(3), key, v)) {
    } else if (key == "out") {
      cfg.out_dir = v;
    } else {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.tau_grid = merged_grid(cfg.tau_grid);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot read " + path);
  return parse_config(is);
}

SplitIndices make_split(std::size_t n, double train_fraction, double calibration_fraction,
                        std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix64(seed ^ 0x73706c6974ULL));
  rng.shuffle(order.begin(), order.end());
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  const auto n_cal = static_cast<std::size_t>(std::llround(calibration_fraction * static_cast<double>(n)));
  require(n_train + n_cal < n, "split leaves no test rows");
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.calibration.assign(order.begin() + n_train, order.begin() + n_train + n_cal);
  s.test.assign(order.begin() + n_train + n_cal, order.end());
  for (auto* part : {&s.train, &s.calibration, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

XyScorer train_xy_mlp(const Dataset& train, const Dataset& calibration, const MlpConfig& config) {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  bool seen[2] = {false, false};
  for (const auto& row : train.rows) {
    require(row.label == 0 || row.label == 1, "xy-mlp needs binary labels");
    xs.push_back(row.features);
    ys.push_back(row.label);
    seen[row.label] = true;
  }
  if (!seen[0] || !seen[1]) fail(ErrorCode::kDegenerateLabels, "degenerate labels");
  XyScorer scorer;
  scorer.net = Mlp::train(xs, ys, config);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& row : calibration.rows) {
    scores.push_back(scorer.net.predict(row.features));
    labels.push_back(row.label);
  }
  scorer.scaler = fit_platt(scores, labels);
  return scorer;
}

namespace {

Dataset subset(const Dataset& data, std::span<const std::size_t> idx) {
  Dataset out;
  out.num_features = data.num_features;
  out.num_concepts = data.num_concepts;
  out.num_classes = data.num_classes;
  out.rows.reserve(idx.size());
  for (std::size_t i : idx) out.rows.push_back(data.rows[i]);
  return out;
}

// Curve for one (method, budget) pair across the tau grid.
std::vector<CurvePoint> evaluate_method(Method method, double budget, const ExperimentConfig& cfg,
                                        const TestSet& test, const Scorer& scorer,
                                        const std::vector<std::vector<double>>& base_scores,
                                        const std::vector<std::vector<double>>& impact_gains,
                                        std::vector<ConfirmationPlan>* plans = nullptr) {
  const std::size_t n = test.labels.size();
  if (plans) plans->assign(cfg.tau_grid.size(), ConfirmationPlan{});
  const std::size_t m = test.q.empty() ? 0 : test.q.front().size();
  std::vector<CurvePoint> curve(cfg.tau_grid.size());
  detail::parallel_for(cfg.tau_grid.size(), [&](std::size_t t) {
    const GateThreshold tau(cfg.tau_grid[t]);
    std::vector<GateDecision> decisions(n, GateDecision::abstain());
    if (method == Method::kXyMlp) {
      for (std::size_t i = 0; i < n; ++i) decisions[i] = apply_gate(test.xy_scores[i], tau);
      curve[t] = evaluate_decisions(tau.value(), decisions, test.labels);
      return;
    }
    std::vector<std::size_t> abstained;
    for (std::size_t i = 0; i < n; ++i) {
      decisions[i] = apply_gate(base_scores[i], tau);
      if (decisions[i].abstained()) abstained.push_back(i);
    }
    if (confirms(method) && !abstained.empty() && budget > 0.0) {
      const ConfirmationCosts costs = ConfirmationCosts::unit(m);
      const ConfirmationBudget b{budget * static_cast<double>(abstained.size() * m), !cfg.faithful_alg1};
      // Ids here are row positions within the test split.
      std::vector<InstanceId> ids(abstained.begin(), abstained.end());
      ConfirmationPlan plan;
      if (method == Method::kCsImpactConf) {
        std::vector<std::vector<double>> table;
        table.reserve(abstained.size());
        for (std::size_t i : abstained) table.push_back(impact_gains[i]);
        plan = greedy_select_gains(ids, table, costs, b);
      } else {
        const std::uint64_t seed = mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(method) * 1000003ULL + t));
        plan = random_select(ids, m, costs, b, seed);
      }
      std::vector<std::vector<std::size_t>> chosen(n);
      for (const auto& s : plan.selections) chosen[s.instance].push_back(s.concept_index);
      // Selections reach an instance in plan order and stop once it is
      // covered, so confirmations only ever touch abstained instances.
      for (std::size_t i : abstained) {
        const ConceptProbs q(test.q[i]);
        const std::span<const std::size_t> S(chosen[i]);
        for (std::size_t j = 1; j <= S.size(); ++j) {
          const auto p = apply_confirmation(q, S.first(j), test.truth[i]);
          decisions[i] = apply_gate(scorer.score(method, p.values()), tau);
          if (!decisions[i].abstained()) break;
        }
      }
      if (plans) {
        for (auto& s : plan.selections) s.instance = test.ids[s.instance];
        (*plans)[t] = std::move(plan);
      }
    }
    curve[t] = evaluate_decisions(tau.value(), decisions, test.labels);
  });
  return curve;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.config = config;

  const bool want_concepts =
      std::any_of(config.methods.begin(), config.methods.end(), uses_concepts);
  const bool want_xy =
      std::find(config.methods.begin(), config.methods.end(), Method::kXyMlp) != config.methods.end();

  // Materialize the data as a Dataset; tables carry q alongside.
  Dataset data;
  ProbabilityTable table;
  if (config.source == ExperimentConfig::Source::kSynthetic) {
    data = synthetic::generate(config.synthetic);
  } else {
    table = ingest_probability_table(config.table_path);
    if (!table.has_concepts) fail(ErrorCode::kInvalidArgument, "probability table needs true concepts c1..cm");
    data.num_features = 0;
    data.num_concepts = table.num_concepts;
    int max_label = 1;
    for (const auto& row : table.rows) {
      require(row.label >= 0, "labels must be non-negative");
      max_label = std::max(max_label, row.label);
      data.rows.push_back({row.id, {}, *row.concepts, row.label});
    }
    data.num_classes = max_label + 1;
  }
  data.validate();
  require(data.size() >= 3, "need at least three rows to split");

  result.split = make_split(data.size(), config.train_fraction, config.calibration_fraction, config.seed);
  const auto& split = result.split;
  const Dataset train = subset(data, split.train);
  const Dataset calibration = subset(data, split.calibration);
  const Dataset test_rows = subset(data, split.test);
  result.metrics["n_train"] = static_cast<double>(split.train.size());
  result.metrics["n_calibration"] = static_cast<double>(split.calibration.size());
  result.metrics["n_test"] = static_cast<double>(split.test.size());

  TestSet test;
  for (const auto& row : test_rows.rows) {
    test.labels.push_back(row.label);
    test.truth.push_back(row.concepts);
    test.ids.push_back(row.id);
  }

  if (want_xy) {
    const auto scorer = train_xy_mlp(train, calibration, [&] {
      MlpConfig c = config.xy_mlp;
      c.seed = mix64(config.seed ^ 0x7879ULL);
      return c;
    }());
    for (const auto& row : test_rows.rows) test.xy_scores.push_back(scorer.predict(row.features));
    result.metrics["xy_mlp.test_auc"] = roc_auc(test.xy_scores, test.labels);
  }

  if (!want_concepts) {
    result.notes["frontend"] = "not trained (no concept-based methods requested)";
  } else {
    // Front-end: fit on the true concepts of the training split.
    std::vector<ConceptLabelPair> pairs;
    for (const auto& row : train.rows) pairs.push_back({row.concepts, row.label});
    FrontEndModel frontend = synthetic::oracle_frontend();
    if (!config.oracle) {
      if (data.num_classes == 2) {
        LogisticTrainConfig fc = config.frontend;
        fc.seed = config.seed;
        frontend = train_frontend_logistic(pairs, fc).model;
      } else {
        frontend = train_frontend_tabular(pairs, data.num_classes, 1.0);
      }
    }
    {
      std::size_t correct = 0;
      for (const auto& row : test_rows.rows) {
        const auto dist = frontend.predict(row.concepts);
        const auto best = static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        correct += best == row.label;
      }
      result.metrics["frontend.test_accuracy_on_true_concepts"] =
          static_cast<double>(correct) / static_cast<double>(test_rows.size());
    }

    // Concept probabilities for the test split.
    const std::size_t m = data.num_concepts;
    if (config.source == ExperimentConfig::Source::kSynthetic) {
      if (config.oracle) {
        for (const auto& row : test_rows.rows) {
          const auto q = synthetic::oracle_concept_probs(row.features, config.synthetic.noise);
          test.q.emplace_back(q.values().begin(), q.values().end());
        }
      } else {
        MlpConfig dc = config.detector;
        dc.seed = mix64(config.seed ^ 0x646574ULL);
        auto detectors = train_detectors(train, dc);
        if (config.calibrate_detectors) {
          const auto skipped = calibrate_detectors(detectors, calibration);
          for (std::size_t k : skipped) result.notes["detector." + std::to_string(k + 1)] = "uncalibrated: single-class holdout";
        }
        for (const auto& row : test_rows.rows) {
          const auto q = predict_concepts(detectors, row.features);
          test.q.emplace_back(q.values().begin(), q.values().end());
        }
      }
    } else {
      std::vector<std::optional<PlattScaler>> scalers(m);
      if (config.calibrate_detectors) {
        for (std::size_t k = 0; k < m; ++k) {
          std::vector<double> s;
          std::vector<int> y;
          for (std::size_t i : split.calibration) {
            s.push_back(table.rows[i].q[k]);
            y.push_back((*table.rows[i].concepts)[k]);
          }
          try {
            scalers[k] = fit_platt(s, y);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kDegenerateLabels) throw;
            result.notes["detector." + std::to_string(k + 1)] = "uncalibrated: single-class holdout";
          }
        }
      }
      for (std::size_t i : split.test) {
        std::vector<double> q = table.rows[i].q;
        for (std::size_t k = 0; k < m; ++k) {
          if (scalers[k]) q[k] = scalers[k]->apply(q[k]);
        }
        test.q.push_back(std::move(q));
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t correct = 0;
      std::vector<double> s;
      std::vector<int> y;
      for (std::size_t i = 0; i < test.q.size(); ++i) {
        correct += (test.q[i][k] > 0.5) == (test.truth[i][k] == 1);
        s.push_back(test.q[i][k]);
        y.push_back(test.truth[i][k]);
      }
      const std::string prefix = "detector." + std::to_string(k + 1);
      result.metrics[prefix + ".test_accuracy"] = static_cast<double>(correct) / static_cast<double>(test.q.size());
      result.metrics[prefix + ".test_ece15"] = expected_calibration_error(s, y, 15);
    }

    result.frontend = frontend;
    result.test_table.num_concepts = m;
    result.test_table.has_concepts = true;
    for (std::size_t i = 0; i < test.q.size(); ++i) {
      result.test_table.rows.push_back({test.ids[i], test.q[i], test.truth[i], test.labels[i]});
    }
  }

  // Unconfirmed scores and static gains, shared by every threshold.
  const FrontEndModel& frontend = result.frontend ? *result.frontend : synthetic::oracle_frontend();
  const Scorer scorer(frontend, config.propagation);
  std::vector<std::vector<double>> baseline_scores, cs_scores, impact_gains;
  const auto needs = [&](auto pred) { return std::any_of(config.methods.begin(), config.methods.end(), pred); };
  const std::size_t n_test = test.q.size();
  if (needs([](Method m) { return uses_concepts(m) && !is_cs(m); })) {
    baseline_scores.resize(n_test);
    detail::parallel_for(n_test, [&](std::size_t i) { baseline_scores[i] = scorer.score(Method::kBaseline, test.q[i]); });
  }
  if (needs(is_cs)) {
    cs_scores.resize(n_test);
    detail::parallel_for(n_test, [&](std::size_t i) { cs_scores[i] = scorer.score(Method::kCs, test.q[i]); });
  }
  if (needs([](Method m) { return m == Method::kCsImpactConf; })) {
    impact_gains.resize(n_test);
    detail::parallel_for(n_test, [&](std::size_t i) { impact_gains[i] = gains(frontend, test.q[i]); });
  }

  for (Method method : config.methods) {
    const auto& base = is_cs(method) ? cs_scores : baseline_scores;
    if (!confirms(method)) {
      const auto curve = evaluate_method(method, 0.0, config, test, scorer, base, impact_gains);
      for (double b : config.budgets) result.curves[{method, b}] = curve;
      continue;
    }
    for (double b : config.budgets) {
      std::vector<ConfirmationPlan> plans;
      result.curves[{method, b}] = evaluate_method(method, b, config, test, scorer, base, impact_gains, &plans);
      if (b <= 0.0) continue;
      for (std::size_t t = 0; t < config.tau_grid.size(); ++t) {
        const double tau = config.tau_grid[t];
        const bool tabled = std::any_of(table_taus().begin(), table_taus().end(),
                                        [&](double x) { return std::abs(x - tau) < 1e-9; });
        if (tabled) result.plans[{method, b, tau}] = std::move(plans[t]);
      }
    }
  }

  result.notes["budget_normalization"] =
      "B = budget * (abstained test instances at tau) * m, unit costs";
  result.notes["confirmation_order"] =
      "selections applied in plan order; an instance receives no further confirmations once covered";
  result.notes["baseline_concepts"] = "detector probabilities thresholded at 0.5 (q > 0.5 -> 1)";
  result.notes["budget_rule"] = config.faithful_alg1 ? "faithful: overspend on final pick" : "strict: no overspend";
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace safeguard
