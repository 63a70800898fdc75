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

/* C interface to the safeguard library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an sg_status; on failure sg_last_error()
 * returns a message for the calling thread that stays valid until that
 * thread's next call into the library.
 *
 * Concept indices passed through this interface are 1-based, matching the
 * c1..cm / q1..qm column names used by the file formats.
 */
#ifndef SAFEGUARD_SAFEGUARD_H_
#define SAFEGUARD_SAFEGUARD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SG_API __declspec(dllexport)
#else
#define SG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT = 1,
  SG_ERR_DEGENERATE_LABELS = 2,
  SG_ERR_LIMIT_EXCEEDED = 3,
  SG_ERR_IO = 4,
  SG_ERR_PARSE = 5,
  SG_ERR_NOT_FOUND = 6,
  SG_ERR_CONFLICT = 7,
  SG_ERR_BUDGET_EXHAUSTED = 8,
  SG_ERR_INTERNAL = 9,
  SG_ERR_BUFFER_TOO_SMALL = 10
} sg_status;

/* Gate output for an abstention. Predictions are class indices >= 0. */
#define SG_ABSTAIN (-1)

typedef struct sg_model sg_model;
typedef struct sg_session sg_session;
typedef struct sg_server sg_server;

SG_API const char* sg_version(void);
SG_API const char* sg_last_error(void);
SG_API const char* sg_status_name(sg_status status);

/* Front-end models. */
SG_API sg_status sg_model_create_logistic(const double* weights, size_t num_concepts,
                                          double intercept, sg_model** out);
/* Generating model of the synthetic benchmark. */
SG_API sg_status sg_model_create_oracle(sg_model** out);
SG_API sg_status sg_model_load(const char* path, sg_model** out);
SG_API sg_status sg_model_save(const sg_model* model, const char* path);
SG_API void sg_model_free(sg_model* model);
SG_API sg_status sg_model_num_concepts(const sg_model* model, size_t* out);
SG_API sg_status sg_model_num_classes(const sg_model* model, size_t* out);

/* Distribution over classes for a hard concept vector; out_len must be at
 * least the number of classes. */
SG_API sg_status sg_model_predict(const sg_model* model, const uint8_t* concepts, size_t m,
                                  double* out, size_t out_len);

/* Uncertainty propagation. */
SG_API sg_status sg_propagate_exact(const sg_model* model, const double* probs, size_t m,
                                    double* out, size_t out_len);
SG_API sg_status sg_propagate_mc(const sg_model* model, const double* probs, size_t m,
                                 uint64_t samples, uint64_t seed, double* out, size_t out_len);

/* Gain of confirming 1-based concept `concept_index` on q. */
SG_API sg_status sg_gain(const sg_model* model, const double* q, size_t m, size_t concept_index,
                         double* out);

/* Selection gate; *decision receives a class index or SG_ABSTAIN. */
SG_API sg_status sg_apply_gate(const double* soft, size_t len, double tau, int* decision);

/* File-level operations used by the command line tool. */
SG_API sg_status sg_synth_generate_file(size_t n, double noise, uint64_t seed, const char* path);
/* out_dir may be NULL to use the directory named in the config. */
SG_API sg_status sg_run_experiment_file(const char* config_path, const char* out_dir);
/* Reads `score,y` rows and writes an accuracy-coverage curve. taus may be
 * NULL (n_taus 0) for the default 0.005-step grid. */
SG_API sg_status sg_curves_file(const char* in_path, const char* out_path, const double* taus,
                                size_t n_taus);

/* Review sessions. costs may be NULL for unit costs; log_path may be NULL.
 * An existing log at log_path is replayed before new records are added. */
SG_API sg_status sg_session_open(const sg_model* model, const char* table_path, double tau,
                                 double budget, const double* costs, size_t num_costs,
                                 const char* log_path, sg_session** out);
SG_API void sg_session_free(sg_session* session);
SG_API sg_status sg_session_confirm(sg_session* session, uint64_t instance_id, size_t concept_index,
                                   int value);
SG_API sg_status sg_session_score(const sg_session* session, uint64_t instance_id,
                                  double* score, int* decision);
SG_API sg_status sg_session_coverage(const sg_session* session, double* coverage,
                                     double* budget_remaining);
/* Writes the GET /metrics JSON document. *needed receives the size
 * including the terminating NUL. */
SG_API sg_status sg_session_metrics_json(const sg_session* session, char* buf, size_t cap,
                                         size_t* needed);

/* HTTP service over a session. The session handle is consumed. */
SG_API sg_status sg_server_create(sg_session* session, sg_server** out);
/* port 0 binds an ephemeral port; *bound_port receives the port. */
SG_API sg_status sg_server_bind(sg_server* server, const char* host, int port, int* bound_port);
/* Blocks until sg_server_stop. */
SG_API sg_status sg_server_run(sg_server* server);
SG_API void sg_server_stop(sg_server* server);
SG_API void sg_server_free(sg_server* server);

#ifdef __cplusplus
}
#endif

#endif  // SAFEGUARD_SAFEGUARD_H_
