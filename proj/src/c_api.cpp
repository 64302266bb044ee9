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

#include "maps/maps.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "maps/error.hpp"
#include "maps/gp_model.hpp"
#include "maps/pipeline.hpp"
#include "maps/similarity.hpp"
#include "maps/synthetic.hpp"

struct maps_context {
  maps::PipelineConfig config;
  std::string last_error;
};

struct maps_report {
  maps::EvaluationReport report;
};

namespace {

maps_status status_of(maps::ErrorKind kind) {
  switch (kind) {
  case maps::ErrorKind::Contract:
    return MAPS_ERR_INVALID_ARGUMENT;
  case maps::ErrorKind::Ingest:
    return MAPS_ERR_INGEST;
  case maps::ErrorKind::Alignment:
    return MAPS_ERR_ALIGNMENT;
  case maps::ErrorKind::Numerical:
    return MAPS_ERR_NUMERICAL;
  case maps::ErrorKind::Fit:
    return MAPS_ERR_FIT;
  case maps::ErrorKind::Training:
    return MAPS_ERR_TRAINING;
  case maps::ErrorKind::MissingDemo:
    return MAPS_ERR_MISSING_DEMO;
  case maps::ErrorKind::Io:
    return MAPS_ERR_IO;
  }
  return MAPS_ERR_INTERNAL;
}

template <class F> maps_status guarded(maps_context *ctx, F &&body) {
  try {
    body();
    if (ctx)
      ctx->last_error.clear();
    return MAPS_OK;
  } catch (const maps::Error &e) {
    if (ctx)
      ctx->last_error = e.what();
    return status_of(e.kind());
  } catch (const std::filesystem::filesystem_error &e) {
    if (ctx)
      ctx->last_error = e.what();
    return MAPS_ERR_IO;
  } catch (const std::exception &e) {
    if (ctx)
      ctx->last_error = e.what();
    return MAPS_ERR_INTERNAL;
  } catch (...) {
    if (ctx)
      ctx->last_error = "unknown error";
    return MAPS_ERR_INTERNAL;
  }
}

maps_status invalid(maps_context *ctx, const char *msg) {
  if (ctx)
    ctx->last_error = msg;
  return MAPS_ERR_INVALID_ARGUMENT;
}

maps::ScenarioSpec to_spec(const maps_scenario &s) {
  maps::ScenarioSpec spec;
  spec.task = s.task == MAPS_TASK_SCREWING ? maps::Task::Screwing : maps::Task::SnapFit;
  spec.n_samples = s.n_samples;
  spec.seed = s.seed;
  spec.start_jitter = s.start_jitter;
  spec.failure_mode = static_cast<maps::FailureMode>(s.failure_mode);
  spec.n_success = s.n_success;
  spec.n_failure = s.n_failure;
  spec.start_shift = s.start_shift;
  return spec;
}

maps_label to_c(maps::Label l) { return l == maps::Label::Success ? MAPS_SUCCESS : MAPS_FAILURE; }

void fill(maps_assessment *out, const maps::Assessment &a) {
  std::memset(out, 0, sizeof *out);
  std::strncpy(out->trajectory_id, a.trajectory_id.c_str(), sizeof out->trajectory_id - 1);
  out->p_success = a.p_success;
  out->predicted = to_c(a.predicted);
  for (int k = 0; k < 6; ++k) {
    out->features[k] = a.features.m[static_cast<std::size_t>(k)];
    out->raw_h[k] = a.features.raw_h[static_cast<std::size_t>(k)];
  }
  out->degenerate = a.features.degenerate ? 1 : 0;
}

char *dup_string(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (p)
    std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

} // namespace

extern "C" {

const char *maps_version(void) { return "1.0.0"; }

const char *maps_status_string(maps_status status) {
  switch (status) {
  case MAPS_OK:
    return "ok";
  case MAPS_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case MAPS_ERR_IO:
    return "i/o error";
  case MAPS_ERR_INGEST:
    return "ingest error";
  case MAPS_ERR_ALIGNMENT:
    return "alignment error";
  case MAPS_ERR_NUMERICAL:
    return "numerical error";
  case MAPS_ERR_FIT:
    return "fit error";
  case MAPS_ERR_TRAINING:
    return "training error";
  case MAPS_ERR_MISSING_DEMO:
    return "missing demonstration";
  case MAPS_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

maps_context *maps_context_create(void) {
  try {
    return new maps_context();
  } catch (...) {
    return nullptr;
  }
}

void maps_context_destroy(maps_context *ctx) { delete ctx; }

const char *maps_context_last_error(const maps_context *ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

maps_status maps_context_set_variance_floor(maps_context *ctx, double floor) {
  if (!ctx)
    return MAPS_ERR_INVALID_ARGUMENT;
  if (!(floor > 0.0))
    return invalid(ctx, "variance floor must be positive");
  ctx->config.variance_floor = floor;
  return MAPS_OK;
}

maps_status maps_context_set_dtw(maps_context *ctx, int enabled) {
  if (!ctx)
    return MAPS_ERR_INVALID_ARGUMENT;
  ctx->config.dtw_enabled = enabled != 0;
  return MAPS_OK;
}

maps_status maps_context_set_parallel(maps_context *ctx, int enabled) {
  if (!ctx)
    return MAPS_ERR_INVALID_ARGUMENT;
  ctx->config.parallel_fits = enabled != 0;
  return MAPS_OK;
}

void maps_scenario_default(maps_scenario *out, maps_task task) {
  if (!out)
    return;
  const auto spec = maps::default_scenario(
      task == MAPS_TASK_SCREWING ? maps::Task::Screwing : maps::Task::SnapFit);
  out->task = task;
  out->n_samples = spec.n_samples;
  out->seed = spec.seed;
  out->start_jitter = spec.start_jitter;
  out->failure_mode = MAPS_FAILURE_NONE;
  out->n_success = spec.n_success;
  out->n_failure = spec.n_failure;
  out->start_shift = spec.start_shift;
}

maps_status maps_generate(maps_context *ctx, const maps_scenario *scenario,
                          const char *out_dir, int force) {
  if (!ctx || !scenario || !out_dir)
    return invalid(ctx, "null argument");
  return guarded(ctx, [&] {
    maps::write_dataset(maps::generate_dataset(to_spec(*scenario)), out_dir, force != 0);
  });
}

maps_status maps_generate_reproduction(maps_context *ctx, const maps_scenario *scenario,
                                       maps_failure_mode mode, size_t index,
                                       const char *path) {
  if (!ctx || !scenario || !path)
    return invalid(ctx, "null argument");
  return guarded(ctx, [&] {
    const std::filesystem::path p(path);
    const auto traj = maps::generate_reproduction(
        to_spec(*scenario), static_cast<maps::FailureMode>(mode), index, p.stem().string());
    if (p.has_parent_path())
      std::filesystem::create_directories(p.parent_path());
    maps::save_trajectory(traj, p, maps::TrajectoryFormat::Csv);
  });
}

maps_status maps_train(maps_context *ctx, const char *dataset_dir, const char *model_path,
                       maps_train_summary *summary) {
  if (!ctx || !dataset_dir || !model_path)
    return invalid(ctx, "null argument");
  return guarded(ctx, [&] {
    auto config = ctx->config;
    config.dataset_dir = dataset_dir;
    config.model_out = model_path;
    const auto outcome = maps::train_pipeline(config);
    maps::write_training_outputs(outcome, config);
    if (summary) {
      *summary = {};
      summary->n_reps = outcome.rows.size();
      for (const auto &r : outcome.rows) {
        if (*r.label == maps::Label::Success)
          ++summary->n_success;
        else
          ++summary->n_failure;
        summary->n_degenerate += r.features.degenerate;
      }
      summary->gp_fit_seconds = outcome.times.get("gp_fit");
    }
  });
}

maps_status maps_assess(maps_context *ctx, const char *dataset_dir, const char *model_path,
                        const char *trajectory_path, maps_assessment *out) {
  if (!ctx || !dataset_dir || !model_path || !trajectory_path || !out)
    return invalid(ctx, "null argument");
  return guarded(ctx, [&] {
    auto config = ctx->config;
    config.dataset_dir = dataset_dir;
    config.model_out = model_path;
    fill(out, maps::assess_trajectory(config, trajectory_path).assessment);
  });
}

maps_status maps_evaluate(maps_context *ctx, const char *const *dataset_dirs,
                          size_t n_datasets, maps_eval_mode mode, maps_report **out) {
  if (!ctx || !dataset_dirs || !out)
    return invalid(ctx, "null argument");
  *out = nullptr;
  return guarded(ctx, [&] {
    std::vector<std::filesystem::path> dirs;
    for (size_t i = 0; i < n_datasets; ++i) {
      if (!dataset_dirs[i])
        throw maps::Error(maps::ErrorKind::Contract, "null dataset path");
      dirs.emplace_back(dataset_dirs[i]);
    }
    auto report = std::make_unique<maps_report>();
    report->report = maps::evaluate(
        dirs, mode == MAPS_EVAL_CROSS_DEMO ? maps::EvalMode::CrossDemo : maps::EvalMode::Loocv,
        ctx->config);
    *out = report.release();
  });
}

void maps_report_destroy(maps_report *report) { delete report; }

double maps_report_accuracy(const maps_report *report) {
  return report ? report->report.accuracy : 0.0;
}

void maps_report_confusion(const maps_report *report, uint64_t counts[4]) {
  if (!report || !counts)
    return;
  const auto &c = report->report.confusion.counts;
  counts[0] = c[0][0];
  counts[1] = c[0][1];
  counts[2] = c[1][0];
  counts[3] = c[1][1];
}

size_t maps_report_size(const maps_report *report) {
  return report ? report->report.per_trajectory.size() : 0;
}

maps_status maps_report_entry(const maps_report *report, size_t index, maps_assessment *out) {
  if (!report || !out || index >= report->report.per_trajectory.size())
    return MAPS_ERR_INVALID_ARGUMENT;
  const auto &e = report->report.per_trajectory[index];
  fill(out, e.assessment);
  out->actual = to_c(e.actual);
  out->has_actual = 1;
  return MAPS_OK;
}

size_t maps_report_dataset_count(const maps_report *report) {
  return report ? report->report.folds.size() : 0;
}

maps_status maps_report_dataset(const maps_report *report, size_t index, const char **name,
                                uint64_t *n, double *accuracy) {
  if (!report || index >= report->report.folds.size())
    return MAPS_ERR_INVALID_ARGUMENT;
  const auto &f = report->report.folds[index];
  if (name)
    *name = f.dataset.c_str();
  if (n)
    *n = f.n;
  if (accuracy)
    *accuracy = f.accuracy;
  return MAPS_OK;
}

size_t maps_report_timing_count(const maps_report *report) {
  return report ? report->report.timing.entries().size() : 0;
}

maps_status maps_report_timing(const maps_report *report, size_t index, const char **stage,
                               double *seconds) {
  if (!report || index >= report->report.timing.entries().size())
    return MAPS_ERR_INVALID_ARGUMENT;
  const auto &e = report->report.timing.entries()[index];
  if (stage)
    *stage = e.first.c_str();
  if (seconds)
    *seconds = e.second;
  return MAPS_OK;
}

maps_status maps_report_render(const maps_report *report, maps_format format,
                               int include_timing, char **out) {
  if (!report || !out)
    return MAPS_ERR_INVALID_ARGUMENT;
  const auto f = format == MAPS_FORMAT_JSON  ? maps::ReportFormat::Json
                 : format == MAPS_FORMAT_CSV ? maps::ReportFormat::Csv
                                             : maps::ReportFormat::Text;
  *out = dup_string(maps::render_report(report->report, f, include_timing != 0));
  return *out ? MAPS_OK : MAPS_ERR_INTERNAL;
}

maps_status maps_report_write(maps_context *ctx, const maps_report *report, const char *dir) {
  if (!ctx || !report || !dir)
    return invalid(ctx, "null argument");
  return guarded(ctx, [&] { maps::write_report_files(report->report, dir); });
}

void maps_string_free(char *s) { std::free(s); }

double maps_quaternion_sq_angle(const double qa[4], const double qb[4]) {
  return maps::quaternion_sq_angle(Eigen::Vector4d(qa[0], qa[1], qa[2], qa[3]),
                                   Eigen::Vector4d(qb[0], qb[1], qb[2], qb[3]));
}

maps_status maps_hellinger_gp(maps_context *ctx, const double *k_demo, const double *k_rep,
                              size_t n, double *out) {
  if (!k_demo || !k_rep || !out || n == 0)
    return invalid(ctx, "null argument or empty matrix");
  return guarded(ctx, [&] {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto dim = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd a = Eigen::Map<const RowMajor>(k_demo, dim, dim);
    const Eigen::MatrixXd b = Eigen::Map<const RowMajor>(k_rep, dim, dim);
    *out = maps::hellinger_gp(a, b);
  });
}

maps_status maps_log_marginal_likelihood(maps_context *ctx, const double *targets,
                                         const double *inputs, size_t n, double theta0,
                                         double theta1, double sigma2, double *out) {
  if (!targets || !inputs || !out || n == 0)
    return invalid(ctx, "null argument or empty input");
  if (!(theta0 > 0.0 && theta1 > 0.0 && sigma2 > 0.0))
    return invalid(ctx, "kernel parameters must be positive");
  return guarded(ctx, [&] {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto dim = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd x = Eigen::Map<const RowMajor>(inputs, dim, maps::kInputDim);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(targets, dim);
    *out = maps::log_marginal_likelihood(w, x, {theta0, theta1, sigma2});
  });
}

} // extern "C"
