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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "maps/error.hpp"
#include "maps/pipeline.hpp"
#include "maps/synthetic.hpp"
#include "test_support.hpp"

using namespace maps;
using maps::testing::TempDir;
namespace fs = std::filesystem;

namespace {

ScenarioSpec small_scenario(std::uint64_t seed) {
  ScenarioSpec spec = default_scenario(Task::SnapFit, seed);
  spec.n_samples = 40;
  spec.n_success = 3;
  spec.n_failure = 3;
  spec.failure_mode = FailureMode::Jam;
  return spec;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no maps::Error thrown");
  return ErrorKind::Contract;
}

PipelineConfig config_for(const TempDir &dir) {
  PipelineConfig c;
  c.dataset_dir = dir / "data";
  c.model_out = dir / "model.json";
  return c;
}

FeatureRow row(const std::string &id, Label label, double m0) {
  FeatureRow r;
  r.trajectory_id = id;
  r.label = label;
  r.features.m.fill((1.0 - m0) / 5.0);
  r.features.m[0] = m0;
  r.features.raw_h = r.features.m;
  return r;
}

} // namespace

TEST_CASE("training writes model, features and demo models deterministically") {
  TempDir dir("pipe_train");
  PipelineConfig c = config_for(dir);
  write_dataset(generate_dataset(small_scenario(1)), c.dataset_dir, false);

  const TrainOutcome out = train_pipeline(c);
  CHECK(out.rows.size() == 6);
  write_training_outputs(out, c);
  REQUIRE(fs::exists(c.model_out));
  REQUIRE(fs::exists(features_path(c.model_out)));
  REQUIRE(fs::exists(demo_models_path(c.model_out)));

  std::istringstream csv(slurp(features_path(c.model_out)));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line))
    ++lines;
  CHECK(lines == 7);

  for (const auto &r : out.rows) {
    double sum = 0.0;
    for (double m : r.features.m)
      sum += m;
    if (!r.features.degenerate)
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(out.times.get("gp_fit") > 0.0);

  const std::string first = slurp(c.model_out);
  const std::string first_features = slurp(features_path(c.model_out));
  write_training_outputs(train_pipeline(c), c);
  CHECK(slurp(c.model_out) == first);
  CHECK(slurp(features_path(c.model_out)) == first_features);

  PipelineConfig serial = c;
  serial.parallel_fits = false;
  serial.model_out = dir / "serial.json";
  write_training_outputs(train_pipeline(serial), serial);
  CHECK(slurp(serial.model_out) == first);
}

TEST_CASE("training preconditions") {
  TempDir dir("pipe_pre");
  PipelineConfig c = config_for(dir);
  ScenarioSpec spec = small_scenario(2);
  spec.n_failure = 0;
  write_dataset(generate_dataset(spec), c.dataset_dir, false);
  CHECK(kind_of([&] { train_pipeline(c); }) == ErrorKind::Training);

  fs::remove_all(c.dataset_dir / "demo");
  fs::create_directories(c.dataset_dir / "demo");
  CHECK(kind_of([&] { train_pipeline(c); }) == ErrorKind::MissingDemo);
}

TEST_CASE("assessment of held-out reproductions") {
  TempDir dir("pipe_assess");
  PipelineConfig c = config_for(dir);
  const ScenarioSpec spec = default_scenario(Task::SnapFit, 3);
  write_dataset(generate_dataset(spec), c.dataset_dir, false);
  write_training_outputs(train_pipeline(c), c);

  const Trajectory good = generate_reproduction(spec, FailureMode::None, 100, "held_success");
  const Trajectory jam = generate_reproduction(spec, FailureMode::Jam, 101, "held_jam");
  save_trajectory(good, dir / "good.json", TrajectoryFormat::Json);
  save_trajectory(jam, dir / "jam.json", TrajectoryFormat::Json);

  const auto a = assess_trajectory(c, dir / "good.json").assessment;
  CHECK(a.trajectory_id == "held_success");
  CHECK(a.predicted == Label::Success);
  CHECK(a.p_success > 0.5);
  const auto j = assess_trajectory(c, dir / "jam.json").assessment;
  CHECK(j.predicted == Label::Failure);

  // Same answer when the cached demo models are absent.
  fs::remove(demo_models_path(c.model_out));
  const auto again = assess_trajectory(c, dir / "good.json").assessment;
  CHECK(again.p_success == doctest::Approx(a.p_success).epsilon(1e-9));

  CHECK(kind_of([&] { assess_trajectory(c, dir / "missing.csv"); }) == ErrorKind::Io);
}

TEST_CASE("demo assessed against itself is flagged degenerate") {
  TempDir dir("pipe_self");
  PipelineConfig c = config_for(dir);
  write_dataset(generate_dataset(small_scenario(4)), c.dataset_dir, false);
  write_training_outputs(train_pipeline(c), c);
  const auto a = assess_trajectory(c, c.dataset_dir / "demo" / "demo.csv").assessment;
  CHECK(a.features.degenerate);
  CHECK(a.p_success >= 0.0);
  CHECK(a.p_success <= 1.0);
}

TEST_CASE("separable features give perfect evaluation") {
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 6; ++i) {
    rows.push_back(row("s" + std::to_string(i), Label::Success, 0.10 + 0.01 * i));
    rows.push_back(row("f" + std::to_string(i), Label::Failure, 0.60 + 0.01 * i));
  }
  const auto loocv = evaluate_features({"a"}, {rows}, EvalMode::Loocv, 1e-4);
  CHECK(loocv.accuracy == 1.0);
  CHECK(loocv.confusion.total() == 12);
  CHECK(loocv.per_trajectory.size() == 12);

  const auto cross = evaluate_features({"a", "b"}, {rows, rows}, EvalMode::CrossDemo, 1e-4);
  CHECK(cross.accuracy == 1.0);
  CHECK(cross.folds.size() == 2);
  CHECK(cross.confusion.total() == 24);

  CHECK(kind_of([&] { evaluate_features({"a"}, {rows}, EvalMode::CrossDemo, 1e-4); }) ==
        ErrorKind::Contract);
}

TEST_CASE("report accuracy is exact bookkeeping") {
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 5; ++i) {
    rows.push_back(row("s" + std::to_string(i), Label::Success, 0.2 + 0.05 * i));
    rows.push_back(row("f" + std::to_string(i), Label::Failure, 0.3 + 0.05 * i));
  }
  const auto r = evaluate_features({"mixed"}, {rows}, EvalMode::Loocv, 1e-4);
  const auto &cm = r.confusion.counts;
  CHECK(cm[0][0] + cm[0][1] + cm[1][0] + cm[1][1] == 10);
  CHECK(r.accuracy == static_cast<double>(cm[0][0] + cm[1][1]) / 10.0);
}

TEST_CASE("reports render deterministically in every format") {
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 4; ++i) {
    rows.push_back(row("s" + std::to_string(i), Label::Success, 0.1 + 0.02 * i));
    rows.push_back(row("f" + std::to_string(i), Label::Failure, 0.5 + 0.02 * i));
  }
  auto r = evaluate_features({"a"}, {rows}, EvalMode::Loocv, 1e-4);
  r.timing.add("gp_fit", 1.5);
  for (auto f : {ReportFormat::Text, ReportFormat::Csv, ReportFormat::Json}) {
    const std::string a = render_report(r, f);
    CHECK(a == render_report(r, f));
    CHECK(a.find("gp_fit") == std::string::npos);
  }
  CHECK(render_report(r, ReportFormat::Text, true).find("gp_fit") != std::string::npos);
  CHECK(render_report(r, ReportFormat::Json, true).find("gp_fit") != std::string::npos);
  const auto j = nlohmann::json::parse(render_report(r, ReportFormat::Json));
  CHECK(j.at("accuracy").get<double>() == r.accuracy);
  CHECK(j.at("per_trajectory").size() == 8);
  CHECK(render_report(r, ReportFormat::Csv).rfind("actual,predicted_success,predicted_failure\n", 0) ==
        0);

  TempDir a("pipe_rep_a");
  TempDir b("pipe_rep_b");
  write_report_files(r, a.path());
  r.timing.add("gp_fit", 7.0);
  write_report_files(r, b.path());
  for (const char *name : {"report.txt", "report.json", "assessments.csv", "confusion.csv"})
    CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("stage times accumulate in first-use order") {
  StageTimes t;
  t.add("load", 0.5);
  t.add("gp_fit", 2.0);
  t.add("load", 0.25);
  REQUIRE(t.entries().size() == 2);
  CHECK(t.entries()[0].first == "load");
  CHECK(t.get("load") == 0.75);
  CHECK(t.get("absent") == 0.0);
}

TEST_CASE("evaluation on disk records non-negative stage times") {
  TempDir dir("pipe_eval");
  write_dataset(generate_dataset(small_scenario(5)), dir / "a", false);
  write_dataset(generate_dataset(small_scenario(6)), dir / "b", false);
  PipelineConfig c;
  const auto loocv = evaluate({dir / "a"}, EvalMode::Loocv, c);
  CHECK(loocv.confusion.total() == 6);
  bool saw_fit = false;
  for (const auto &[stage, s] : loocv.timing.entries()) {
    CHECK(s >= 0.0);
    saw_fit = saw_fit || stage == "gp_fit";
  }
  CHECK(saw_fit);

  const auto cross = evaluate({dir / "a", dir / "b"}, EvalMode::CrossDemo, c);
  CHECK(cross.confusion.total() == 12);
  CHECK(cross.folds.at(0).dataset == "a");
  CHECK(kind_of([&] { evaluate({dir / "a"}, EvalMode::CrossDemo, c); }) == ErrorKind::Contract);
}

TEST_CASE("disabling alignment on aligned data changes no prediction") {
  TempDir dir("pipe_nodtw");
  ScenarioSpec spec = small_scenario(7);
  spec.start_jitter = 0.0;
  spec.n_success = 4;
  spec.n_failure = 4;
  spec.failure_mode = FailureMode::None;
  write_dataset(generate_dataset(spec), dir / "d", false);
  PipelineConfig with;
  PipelineConfig without;
  without.dtw_enabled = false;
  const auto a = evaluate({dir / "d"}, EvalMode::Loocv, with);
  const auto b = evaluate({dir / "d"}, EvalMode::Loocv, without);
  REQUIRE(a.per_trajectory.size() == b.per_trajectory.size());
  for (std::size_t i = 0; i < a.per_trajectory.size(); ++i)
    CHECK(a.per_trajectory[i].assessment.predicted == b.per_trajectory[i].assessment.predicted);
}
