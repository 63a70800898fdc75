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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "oracles.hpp"
#include "safeguard/safeguard.h"
#include "test_util.hpp"

namespace {

// Writes a probability table from the synthetic oracle for session tests.
void write_table(const std::string& path, std::size_t n) {
  const std::string csv = path + ".synth.csv";
  REQUIRE(sg_synth_generate_file(n, 0.25, 3, csv.c_str()) == SG_OK);
  std::ifstream is(csv);
  std::ofstream os(path);
  std::string line;
  std::getline(is, line);
  os << "id,q1,q2,q3,c1,c2,c3,y\n";
  for (std::size_t id = 0; std::getline(is, line); ++id) {
    int v[9];
    std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%d,%d,%d,%d", &v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7],
                &v[8]);
    const int par[3] = {v[0] ^ v[1] ^ v[3], v[0] ^ v[1] ^ v[2], v[0] ^ v[1] ^ v[4]};
    os << id;
    for (int k : par) os << ',' << (k ? 0.75 : 0.25);
    os << ',' << v[5] << ',' << v[6] << ',' << v[7] << ',' << v[8] << '\n';
  }
}

}  // namespace

TEST_SUITE("c-api") {
  TEST_CASE("version and status names") {
    CHECK(std::string(sg_version()).size() > 0);
    CHECK(std::string(sg_status_name(SG_ERR_BUDGET_EXHAUSTED)) == "budget exhausted");
  }

  TEST_CASE("model lifecycle and inference") {
    const double w[] = {1, 2, 3};
    sg_model* model = nullptr;
    REQUIRE(sg_model_create_logistic(w, 3, -2, &model) == SG_OK);
    size_t m = 0, classes = 0;
    CHECK(sg_model_num_concepts(model, &m) == SG_OK);
    CHECK(sg_model_num_classes(model, &classes) == SG_OK);
    CHECK(m == 3);
    CHECK(classes == 2);

    const uint8_t c[] = {1, 1, 1};
    double dist[2];
    CHECK(sg_model_predict(model, c, 3, dist, 2) == SG_OK);
    CHECK(dist[1] == doctest::Approx(oracle::sigmoid(4)));

    const double p[] = {0.5, 0.5, 0.5};
    CHECK(sg_propagate_exact(model, p, 3, dist, 2) == SG_OK);
    CHECK(std::abs(dist[1] - oracle::brute_force_propagate({1, 2, 3}, -2, {0.5, 0.5, 0.5})) < 1e-12);
    double mc[2];
    CHECK(sg_propagate_mc(model, p, 3, 100000, 1, mc, 2) == SG_OK);
    CHECK(std::abs(mc[1] - dist[1]) < 0.01);

    double g = 0;
    const double q[] = {0.5};
    const double w1[] = {4};
    sg_model* one = nullptr;
    REQUIRE(sg_model_create_logistic(w1, 1, -2, &one) == SG_OK);
    CHECK(sg_gain(one, q, 1, 1, &g) == SG_OK);
    CHECK(std::abs(g - oracle::two_point_variance({4}, -2, {0.5}, 0)) < 1e-12);
    CHECK(sg_gain(one, q, 1, 0, &g) == SG_ERR_INVALID_ARGUMENT);
    CHECK(std::string(sg_last_error()).find("1..m") != std::string::npos);
    sg_model_free(one);

    int decision = 0;
    CHECK(sg_apply_gate(&dist[1], 1, 0.5, &decision) == SG_OK);
    CHECK(decision == 1);
    const double mid = 0.5;
    CHECK(sg_apply_gate(&mid, 1, 0.2, &decision) == SG_OK);
    CHECK(decision == SG_ABSTAIN);
    CHECK(sg_apply_gate(&mid, 1, 0.7, &decision) == SG_ERR_INVALID_ARGUMENT);

    const uint8_t bad[] = {1, 2, 0};
    CHECK(sg_model_predict(model, bad, 3, dist, 2) == SG_ERR_INVALID_ARGUMENT);
    CHECK(std::string(sg_last_error()).find("hard concepts required") != std::string::npos);
    CHECK(sg_model_predict(model, c, 3, dist, 1) == SG_ERR_INVALID_ARGUMENT);
    CHECK(sg_model_predict(nullptr, c, 3, dist, 2) == SG_ERR_INVALID_ARGUMENT);

    std::vector<double> big_p(30, 0.5), big_w(30, 0.1);
    sg_model* big = nullptr;
    REQUIRE(sg_model_create_logistic(big_w.data(), 30, 0, &big) == SG_OK);
    CHECK(sg_propagate_exact(big, big_p.data(), 30, dist, 2) == SG_ERR_LIMIT_EXCEEDED);
    sg_model_free(big);
    sg_model_free(model);
  }

  TEST_CASE("model files round trip") {
    const TempDir dir;
    const auto path = (dir.path / "f.model").string();
    sg_model* model = nullptr;
    REQUIRE(sg_model_create_oracle(&model) == SG_OK);
    CHECK(sg_model_save(model, path.c_str()) == SG_OK);
    sg_model* loaded = nullptr;
    REQUIRE(sg_model_load(path.c_str(), &loaded) == SG_OK);
    const uint8_t c[] = {1, 0, 1};
    double a[2], b[2];
    sg_model_predict(model, c, 3, a, 2);
    sg_model_predict(loaded, c, 3, b, 2);
    CHECK(a[1] == b[1]);
    sg_model_free(model);
    sg_model_free(loaded);
    CHECK(sg_model_load("/nonexistent/model", &loaded) == SG_ERR_IO);
  }

  TEST_CASE("curves from score files") {
    const TempDir dir;
    const auto in = (dir.path / "scores.csv").string();
    const auto out = (dir.path / "curve.csv").string();
    std::ofstream(in) << "score,y\n0.99,1\n0.01,0\n0.6,1\n";
    const double taus[] = {0.05, 0.45};
    REQUIRE(sg_curves_file(in.c_str(), out.c_str(), taus, 2) == SG_OK);
    CHECK(read_all(out) ==
          "tau,coverage,selective_accuracy,n_covered\n0.050000,0.666667,1.000000,2\n0.450000,1.000000,1.000000,3\n");
    std::ofstream(in) << "score,y\n1.5,1\n";
    CHECK(sg_curves_file(in.c_str(), out.c_str(), taus, 2) == SG_ERR_PARSE);
    CHECK(std::string(sg_last_error()).find("row 1") != std::string::npos);
  }

  TEST_CASE("sessions with log replay") {
    const TempDir dir;
    const auto table = (dir.path / "table.csv").string();
    const auto log = (dir.path / "session.log").string();
    write_table(table, 400);
    sg_model* model = nullptr;
    REQUIRE(sg_model_create_oracle(&model) == SG_OK);
    sg_session* session = nullptr;
    REQUIRE(sg_session_open(model, table.c_str(), 0.1, 3, nullptr, 0, log.c_str(), &session) == SG_OK);
    double coverage = 0, remaining = 0;
    CHECK(sg_session_coverage(session, &coverage, &remaining) == SG_OK);
    CHECK(remaining == 3);

    // Find an abstained instance and confirm a concept.
    uint64_t target = 0;
    for (uint64_t id = 0; id < 400; ++id) {
      int decision = 0;
      REQUIRE(sg_session_score(session, id, nullptr, &decision) == SG_OK);
      if (decision == SG_ABSTAIN) {
        target = id;
        break;
      }
    }
    CHECK(sg_session_confirm(session, target, 3, 1) == SG_OK);
    CHECK(sg_session_confirm(session, target, 3, 1) == SG_ERR_CONFLICT);
    CHECK(sg_session_confirm(session, 123456, 1, 1) == SG_ERR_NOT_FOUND);
    CHECK(sg_session_confirm(session, target, 0, 1) == SG_ERR_INVALID_ARGUMENT);
    double score = 0;
    CHECK(sg_session_score(session, target, &score, nullptr) == SG_OK);

    size_t needed = 0;
    CHECK(sg_session_metrics_json(session, nullptr, 0, &needed) == SG_ERR_BUFFER_TOO_SMALL);
    std::string buf(needed, '\0');
    CHECK(sg_session_metrics_json(session, buf.data(), buf.size(), &needed) == SG_OK);
    CHECK(std::string(buf.c_str()).find("\"revision\":1") != std::string::npos);
    sg_session_free(session);

    // Reopening replays the log.
    sg_session* again = nullptr;
    REQUIRE(sg_session_open(model, table.c_str(), 0.1, 3, nullptr, 0, log.c_str(), &again) == SG_OK);
    double replayed = 0;
    CHECK(sg_session_score(again, target, &replayed, nullptr) == SG_OK);
    CHECK(replayed == score);
    CHECK(sg_session_coverage(again, nullptr, &remaining) == SG_OK);
    CHECK(remaining == 2);
    sg_session_free(again);

    const double costs[] = {1, 1};
    CHECK(sg_session_open(model, table.c_str(), 0.1, 3, costs, 2, nullptr, &again) == SG_ERR_INVALID_ARGUMENT);
    sg_model_free(model);
  }

  TEST_CASE("server lifecycle") {
    const TempDir dir;
    const auto table = (dir.path / "table.csv").string();
    write_table(table, 200);
    sg_model* model = nullptr;
    REQUIRE(sg_model_create_oracle(&model) == SG_OK);
    sg_session* session = nullptr;
    REQUIRE(sg_session_open(model, table.c_str(), 0.1, 3, nullptr, 0, nullptr, &session) == SG_OK);
    sg_model_free(model);
    sg_server* server = nullptr;
    REQUIRE(sg_server_create(session, &server) == SG_OK);
    int port = 0;
    REQUIRE(sg_server_bind(server, "127.0.0.1", 0, &port) == SG_OK);
    std::thread worker([&] { sg_server_run(server); });
    httplib::Client client("127.0.0.1", port);
    httplib::Result res;
    for (int i = 0; i < 200 && !(res = client.Get("/session")); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    REQUIRE(res);
    CHECK(res->status == 200);
    sg_server_stop(server);
    worker.join();
    sg_server_free(server);
  }
}
