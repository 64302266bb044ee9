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

// map: command-line front end over the maps C API.
//
//   map generate --task snapfit --seed 7 --dataset out/snap
//   map train    --dataset out/snap --model out/snap.model.json
//   map assess   --dataset out/snap --model out/snap.model.json rep.csv
//   map eval     --dataset out/snap --mode loocv
//
// Exit codes: 0 success (assess: predicted success), 1 assess predicted
// failure, 2 bad input / missing demo / I/O, 3 single-class training data,
// 4 numerical or internal failure.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maps/maps.h"

namespace {

using ContextPtr = std::unique_ptr<maps_context, decltype(&maps_context_destroy)>;

int exit_code(maps_status s) {
  switch (s) {
  case MAPS_OK:
    return 0;
  case MAPS_ERR_TRAINING:
    return 3;
  case MAPS_ERR_INVALID_ARGUMENT:
  case MAPS_ERR_IO:
  case MAPS_ERR_INGEST:
  case MAPS_ERR_ALIGNMENT:
  case MAPS_ERR_MISSING_DEMO:
    return 2;
  default:
    return 4;
  }
}

int fail(const maps_context *ctx, maps_status s) {
  std::fprintf(stderr, "map: %s: %s\n", maps_status_string(s), maps_context_last_error(ctx));
  return exit_code(s);
}

struct CommonOptions {
  bool no_dtw = false;
  double variance_floor = 1e-4;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
  cmd->add_flag("--no-dtw", opts.no_dtw,
                "Pair samples by index instead of dynamic time warping");
  cmd->add_option("--variance-floor", opts.variance_floor,
                  "Lower bound on per-feature standard deviations")
      ->check(CLI::PositiveNumber);
}

maps_status configure(maps_context *ctx, const CommonOptions &opts) {
  maps_status s = maps_context_set_dtw(ctx, opts.no_dtw ? 0 : 1);
  if (s == MAPS_OK)
    s = maps_context_set_variance_floor(ctx, opts.variance_floor);
  return s;
}

void print_assessment(const maps_assessment &a) {
  std::printf("%s %.6f %s%s\n", a.trajectory_id, a.p_success,
              a.predicted == MAPS_SUCCESS ? "success" : "failure",
              a.degenerate ? " degenerate-features" : "");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Movement assessment primitives: GP wrench models, Hellinger "
               "similarity features and a naive Bayes success classifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", maps_version());

  ContextPtr ctx(maps_context_create(), &maps_context_destroy);
  if (!ctx) {
    std::fprintf(stderr, "map: out of memory\n");
    return 4;
  }

  // generate
  auto *gen = app.add_subcommand("generate", "Write a synthetic labeled dataset");
  std::string task = "snapfit";
  std::string gen_dir;
  std::uint64_t seed = 0;
  std::size_t reps = 20;
  int failures = -1;
  std::size_t samples = 0;
  double jitter = -1.0;
  double shift = 0.0;
  std::string failure_mode = "none";
  bool force = false;
  gen->add_option("--task", task, "snapfit | screwing")
      ->check(CLI::IsMember({"snapfit", "screwing"}));
  gen->add_option("--dataset", gen_dir, "Output directory (default dataset_<task>_<seed>)");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--reps", reps, "Number of reproductions (half of them failures)")
      ->check(CLI::Range(2, 100000));
  gen->add_option("--failures", failures, "Number of failure reproductions");
  gen->add_option("--samples", samples, "Samples per trajectory (default 97 / 204)");
  gen->add_option("--jitter", jitter, "Start offset standard deviation in meters");
  gen->add_option("--shift", shift, "Extra start offset of success reproductions (m)");
  gen->add_option("--failure-mode", failure_mode, "none (mixed) | jam | miss | loose")
      ->check(CLI::IsMember({"none", "jam", "miss", "loose"}));
  gen->add_flag("--force", force, "Replace an existing dataset");

  // train
  auto *train = app.add_subcommand("train", "Train the assessment classifier on a dataset");
  std::string dataset;
  std::string model = "model.json";
  CommonOptions train_opts;
  train->add_option("--dataset", dataset, "Dataset directory")->required();
  train->add_option("--model", model, "Classifier output path");
  add_common(train, train_opts);

  // assess
  auto *assess = app.add_subcommand("assess", "Assess one trajectory");
  std::string trajectory;
  CommonOptions assess_opts;
  assess->add_option("--dataset", dataset, "Dataset directory holding the demonstration")
      ->required();
  assess->add_option("--model", model, "Trained classifier");
  assess->add_option("trajectory", trajectory, "Trajectory CSV (with sidecar) or JSON")
      ->required();
  add_common(assess, assess_opts);

  // eval
  auto *eval = app.add_subcommand("eval", "Leave-one-out or cross-demonstration evaluation");
  std::vector<std::string> datasets;
  std::string mode = "loocv";
  std::string out_format = "text";
  std::string report_dir;
  bool timing = false;
  CommonOptions eval_opts;
  eval->add_option("--dataset", datasets, "Dataset directory (repeat for cross-demo)")
      ->required();
  eval->add_option("--mode", mode, "loocv | cross-demo")
      ->check(CLI::IsMember({"loocv", "cross-demo"}));
  eval->add_option("--out-format", out_format, "text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  eval->add_option("--report-dir", report_dir, "Also write report.{txt,json} and CSVs here");
  eval->add_flag("--timing", timing, "Include per-stage timing in the printed report");
  add_common(eval, eval_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    maps_scenario sc;
    maps_scenario_default(&sc, task == "screwing" ? MAPS_TASK_SCREWING : MAPS_TASK_SNAPFIT);
    sc.seed = seed;
    const std::size_t n_fail = failures >= 0 ? static_cast<std::size_t>(failures) : reps / 2;
    if (n_fail > reps) {
      std::fprintf(stderr, "map: --failures exceeds --reps\n");
      return 2;
    }
    sc.n_failure = n_fail;
    sc.n_success = reps - n_fail;
    if (samples)
      sc.n_samples = samples;
    if (jitter >= 0.0)
      sc.start_jitter = jitter;
    sc.start_shift = shift;
    sc.failure_mode = failure_mode == "jam"     ? MAPS_FAILURE_JAM
                      : failure_mode == "miss"  ? MAPS_FAILURE_MISS
                      : failure_mode == "loose" ? MAPS_FAILURE_LOOSE
                                                : MAPS_FAILURE_NONE;
    if (gen_dir.empty())
      gen_dir = "dataset_" + task + "_" + std::to_string(seed);
    const maps_status s = maps_generate(ctx.get(), &sc, gen_dir.c_str(), force ? 1 : 0);
    if (s != MAPS_OK)
      return fail(ctx.get(), s);
    std::printf("%s\n", gen_dir.c_str());
    return 0;
  }

  if (train->parsed()) {
    maps_status s = configure(ctx.get(), train_opts);
    maps_train_summary summary{};
    if (s == MAPS_OK)
      s = maps_train(ctx.get(), dataset.c_str(), model.c_str(), &summary);
    if (s != MAPS_OK)
      return fail(ctx.get(), s);
    std::printf("trained on %zu reproductions (%zu success, %zu failure), model: %s\n",
                summary.n_reps, summary.n_success, summary.n_failure, model.c_str());
    if (summary.n_degenerate)
      std::printf("%zu reproductions had degenerate features\n", summary.n_degenerate);
    std::fprintf(stderr, "gp fit time: %.3f s\n", summary.gp_fit_seconds);
    return 0;
  }

  if (assess->parsed()) {
    maps_status s = configure(ctx.get(), assess_opts);
    maps_assessment a{};
    if (s == MAPS_OK)
      s = maps_assess(ctx.get(), dataset.c_str(), model.c_str(), trajectory.c_str(), &a);
    if (s != MAPS_OK) {
      fail(ctx.get(), s);
      return 2;
    }
    print_assessment(a);
    return a.predicted == MAPS_SUCCESS ? 0 : 1;
  }

  if (eval->parsed()) {
    maps_status s = configure(ctx.get(), eval_opts);
    if (s != MAPS_OK)
      return fail(ctx.get(), s);
    std::vector<const char *> dirs;
    for (const auto &d : datasets)
      dirs.push_back(d.c_str());
    maps_report *raw = nullptr;
    s = maps_evaluate(ctx.get(), dirs.data(), dirs.size(),
                      mode == "cross-demo" ? MAPS_EVAL_CROSS_DEMO : MAPS_EVAL_LOOCV, &raw);
    if (s != MAPS_OK)
      return fail(ctx.get(), s);
    std::unique_ptr<maps_report, decltype(&maps_report_destroy)> report(raw, &maps_report_destroy);

    const maps_format fmt = out_format == "json" ? MAPS_FORMAT_JSON
                            : out_format == "csv" ? MAPS_FORMAT_CSV
                                                  : MAPS_FORMAT_TEXT;
    char *text = nullptr;
    s = maps_report_render(report.get(), fmt, timing ? 1 : 0, &text);
    if (s != MAPS_OK)
      return fail(ctx.get(), s);
    std::fputs(text, stdout);
    maps_string_free(text);

    if (!report_dir.empty()) {
      s = maps_report_write(ctx.get(), report.get(), report_dir.c_str());
      if (s != MAPS_OK)
        return fail(ctx.get(), s);
    }
    for (std::size_t i = 0; i < maps_report_timing_count(report.get()); ++i) {
      const char *stage = nullptr;
      double secs = 0.0;
      maps_report_timing(report.get(), i, &stage, &secs);
      std::fprintf(stderr, "timing %-18s %.3f s\n", stage, secs);
    }
    return 0;
  }
  return 2;
}
