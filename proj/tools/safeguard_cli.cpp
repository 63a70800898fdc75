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

// Command line front end over the C interface.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "safeguard/safeguard.h"

namespace {

sg_server* g_server = nullptr;

void on_signal(int) {
  if (g_server) sg_server_stop(g_server);
}

int report(sg_status status, const char* what) {
  if (status == SG_OK) return 0;
  std::cerr << "safeguard " << what << ": " << sg_status_name(status) << ": " << sg_last_error() << '\n';
  return 1;
}

int serve(const std::string& model_path, const std::string& table_path, double tau, double budget,
          const std::vector<double>& costs, const std::string& log_path, const std::string& host, int port) {
  sg_model* model = nullptr;
  sg_status st = model_path == "oracle" ? sg_model_create_oracle(&model) : sg_model_load(model_path.c_str(), &model);
  if (st != SG_OK) return report(st, "serve");
  sg_session* session = nullptr;
  st = sg_session_open(model, table_path.c_str(), tau, budget, costs.empty() ? nullptr : costs.data(), costs.size(),
                       log_path.empty() ? nullptr : log_path.c_str(), &session);
  sg_model_free(model);
  if (st != SG_OK) return report(st, "serve");
  sg_server* server = nullptr;
  st = sg_server_create(session, &server);
  if (st != SG_OK) {
    sg_session_free(session);
    return report(st, "serve");
  }
  int bound = 0;
  st = sg_server_bind(server, host.c_str(), port, &bound);
  if (st != SG_OK) {
    sg_server_free(server);
    return report(st, "serve");
  }
  std::cout << "listening on http://" << host << ':' << bound << std::endl;
  g_server = server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  st = sg_server_run(server);
  g_server = nullptr;
  sg_server_free(server);
  return report(st, "serve");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"safeguard: selective classification over concept bottlenecks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sg_version());

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("--config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--out", out_dir, "Override the output directory");

  std::size_t n = 1000;
  double noise = 0.25;
  std::uint64_t seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a noisyconcepts dataset as CSV");
  synth->add_option("--n", n, "Number of rows")->required();
  synth->add_option("--noise", noise, "Concept flip probability in [0, 1]")->required();
  synth->add_option("--seed", seed, "Seed")->required();
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  std::string curves_in, curves_out;
  std::vector<double> taus;
  auto* curves = app.add_subcommand("curves", "Accuracy-coverage curve from score,y rows");
  curves->add_option("--in", curves_in, "Input CSV with header score,y")->required();
  curves->add_option("--out", curves_out, "Output curve CSV")->required();
  curves->add_option("--taus", taus, "Thresholds (default 0 to 0.5 in steps of 0.005)")->delimiter(',');

  std::string model_path, table_path, log_path, host = "127.0.0.1";
  double tau = 0.1, budget = 0.0;
  std::vector<double> costs;
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Serve a review session over HTTP");
  srv->add_option("--model", model_path, "Front-end model file, or 'oracle'")->required();
  srv->add_option("--table", table_path, "Concept probability table CSV")->required();
  srv->add_option("--tau", tau, "Gate threshold in [0, 0.5]");
  srv->add_option("--budget", budget, "Confirmation budget");
  srv->add_option("--costs", costs, "Per-concept costs (default 1 each)")->delimiter(',');
  srv->add_option("--log", log_path, "Append-only confirmation log; replayed on start");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port (0 picks a free port)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return report(sg_run_experiment_file(config_path.c_str(), out_dir.empty() ? nullptr : out_dir.c_str()), "run");
  }
  if (synth->parsed()) return report(sg_synth_generate_file(n, noise, seed, synth_out.c_str()), "synth");
  if (curves->parsed()) {
    return report(sg_curves_file(curves_in.c_str(), curves_out.c_str(), taus.empty() ? nullptr : taus.data(),
                                 taus.size()),
                  "curves");
  }
  return serve(model_path, table_path, tau, budget, costs, log_path, host, port);
}
