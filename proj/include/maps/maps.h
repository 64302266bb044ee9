/*
 * Copyright 2026 The MAPs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

/* C interface to the movement assessment pipeline. Every fallible call
 * returns a maps_status; the message of the last failure on a context is
 * available through maps_context_last_error(). Handles are opaque and owned
 * by the caller, who releases them with the matching *_destroy function. */

#ifndef MAPS_MAPS_H
#define MAPS_MAPS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MAPS_BUILDING_LIBRARY)
#define MAPS_API __declspec(dllexport)
#else
#define MAPS_API __declspec(dllimport)
#endif
#else
#define MAPS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum maps_status {
  MAPS_OK = 0,
  MAPS_ERR_INVALID_ARGUMENT = 1,
  MAPS_ERR_IO = 2,
  MAPS_ERR_INGEST = 3,
  MAPS_ERR_ALIGNMENT = 4,
  MAPS_ERR_NUMERICAL = 5,
  MAPS_ERR_FIT = 6,
  MAPS_ERR_TRAINING = 7, /* a class has no labeled instances */
  MAPS_ERR_MISSING_DEMO = 8,
  MAPS_ERR_INTERNAL = 9
} maps_status;

typedef enum maps_task { MAPS_TASK_SNAPFIT = 0, MAPS_TASK_SCREWING = 1 } maps_task;

typedef enum maps_failure_mode {
  MAPS_FAILURE_NONE = 0, /* for a scenario: cycle through the task's modes */
  MAPS_FAILURE_JAM = 1,
  MAPS_FAILURE_MISS = 2,
  MAPS_FAILURE_LOOSE = 3
} maps_failure_mode;

typedef enum maps_label { MAPS_SUCCESS = 0, MAPS_FAILURE = 1 } maps_label;

typedef enum maps_eval_mode { MAPS_EVAL_LOOCV = 0, MAPS_EVAL_CROSS_DEMO = 1 } maps_eval_mode;

typedef enum maps_format {
  MAPS_FORMAT_TEXT = 0,
  MAPS_FORMAT_CSV = 1,
  MAPS_FORMAT_JSON = 2
} maps_format;

typedef struct maps_context maps_context;
typedef struct maps_report maps_report;

typedef struct maps_scenario {
  maps_task task;
  size_t n_samples;
  uint64_t seed;
  double start_jitter;           /* m */
  maps_failure_mode failure_mode;
  size_t n_success;
  size_t n_failure;
  double start_shift;            /* m, added to success reproductions' start */
} maps_scenario;

typedef struct maps_assessment {
  char trajectory_id[128];
  double p_success;
  maps_label predicted;
  maps_label actual; /* only meaningful inside a report */
  int has_actual;
  double features[6];
  double raw_h[6];
  int degenerate;
} maps_assessment;

typedef struct maps_train_summary {
  size_t n_reps;
  size_t n_success;
  size_t n_failure;
  size_t n_degenerate;
  double gp_fit_seconds;
} maps_train_summary;

MAPS_API const char *maps_version(void);
MAPS_API const char *maps_status_string(maps_status status);

MAPS_API maps_context *maps_context_create(void);
MAPS_API void maps_context_destroy(maps_context *ctx);
MAPS_API const char *maps_context_last_error(const maps_context *ctx);

MAPS_API maps_status maps_context_set_variance_floor(maps_context *ctx, double floor);
MAPS_API maps_status maps_context_set_dtw(maps_context *ctx, int enabled);
MAPS_API maps_status maps_context_set_parallel(maps_context *ctx, int enabled);

/* Scenario defaults for a task: Table-scale sample count, 10 + 10 reps. */
MAPS_API void maps_scenario_default(maps_scenario *out, maps_task task);

/* Writes demo/, reps/ and manifest.json under out_dir. A non-empty target
 * needs force != 0. */
MAPS_API maps_status maps_generate(maps_context *ctx, const maps_scenario *scenario,
                                   const char *out_dir, int force);

/* Writes a single reproduction (CSV + sidecar) of the scenario's
 * demonstration; `index` selects the random stream. */
MAPS_API maps_status maps_generate_reproduction(maps_context *ctx,
                                                const maps_scenario *scenario,
                                                maps_failure_mode mode, size_t index,
                                                const char *path);

/* Training branch. Writes model_path plus <stem>.features.csv and
 * <stem>.demo_gp.json next to it. summary may be NULL. */
MAPS_API maps_status maps_train(maps_context *ctx, const char *dataset_dir,
                                const char *model_path, maps_train_summary *summary);

/* Apply branch for one trajectory file against the dataset's demo. */
MAPS_API maps_status maps_assess(maps_context *ctx, const char *dataset_dir,
                                 const char *model_path, const char *trajectory_path,
                                 maps_assessment *out);

MAPS_API maps_status maps_evaluate(maps_context *ctx, const char *const *dataset_dirs,
                                   size_t n_datasets, maps_eval_mode mode,
                                   maps_report **out);

MAPS_API void maps_report_destroy(maps_report *report);
MAPS_API double maps_report_accuracy(const maps_report *report);
/* counts[actual * 2 + predicted], 0 = success, 1 = failure */
MAPS_API void maps_report_confusion(const maps_report *report, uint64_t counts[4]);
MAPS_API size_t maps_report_size(const maps_report *report);
MAPS_API maps_status maps_report_entry(const maps_report *report, size_t index,
                                       maps_assessment *out);
MAPS_API size_t maps_report_dataset_count(const maps_report *report);
MAPS_API maps_status maps_report_dataset(const maps_report *report, size_t index,
                                         const char **name, uint64_t *n, double *accuracy);
MAPS_API size_t maps_report_timing_count(const maps_report *report);
MAPS_API maps_status maps_report_timing(const maps_report *report, size_t index,
                                        const char **stage, double *seconds);
/* Rendered report in a malloc'd string released with maps_string_free.
 * Timing is included only when include_timing != 0. */
MAPS_API maps_status maps_report_render(const maps_report *report, maps_format format,
                                        int include_timing, char **out);
MAPS_API maps_status maps_report_write(maps_context *ctx, const maps_report *report,
                                       const char *dir);
MAPS_API void maps_string_free(char *s);

/* Numeric primitives. Matrices are n x n, row-major (symmetric anyway). */
MAPS_API double maps_quaternion_sq_angle(const double qa[4], const double qb[4]);
MAPS_API maps_status maps_hellinger_gp(maps_context *ctx, const double *k_demo,
                                       const double *k_rep, size_t n, double *out);
/* inputs is n x 8 row-major (t, x, y, z, qw, qx, qy, qz). */
MAPS_API maps_status maps_log_marginal_likelihood(maps_context *ctx, const double *targets,
                                                  const double *inputs, size_t n,
                                                  double theta0, double theta1,
                                                  double sigma2, double *out);

#ifdef __cplusplus
}
#endif

#endif
