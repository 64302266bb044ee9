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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "maps/maps.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path;
  explicit Scratch(const std::string &tag)
      : path(fs::temp_directory_path() / ("maps_capi_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string &sub = "") const { return (path / sub).string(); }
};

struct Context {
  maps_context *ctx = maps_context_create();
  ~Context() { maps_context_destroy(ctx); }
};

maps_scenario small(std::uint64_t seed) {
  maps_scenario s;
  maps_scenario_default(&s, MAPS_TASK_SNAPFIT);
  s.seed = seed;
  s.n_success = 3;
  s.n_failure = 3;
  s.failure_mode = MAPS_FAILURE_JAM;
  return s;
}

} // namespace

TEST_CASE("status strings and version") {
  CHECK(std::strlen(maps_version()) > 0);
  for (int s = MAPS_OK; s <= MAPS_ERR_INTERNAL; ++s)
    CHECK(std::strlen(maps_status_string(static_cast<maps_status>(s))) > 0);
}

TEST_CASE("scenario defaults") {
  maps_scenario s;
  maps_scenario_default(&s, MAPS_TASK_SCREWING);
  CHECK(s.n_samples == 204);
  CHECK(s.n_success == 10);
  CHECK(s.n_failure == 10);
  maps_scenario_default(&s, MAPS_TASK_SNAPFIT);
  CHECK(s.n_samples == 97);
}

TEST_CASE("context setters validate") {
  Context c;
  CHECK(maps_context_set_variance_floor(c.ctx, 0.0) == MAPS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(maps_context_last_error(c.ctx)) > 0);
  CHECK(maps_context_set_variance_floor(c.ctx, 1e-3) == MAPS_OK);
  CHECK(maps_context_set_dtw(c.ctx, 0) == MAPS_OK);
  CHECK(maps_context_set_parallel(c.ctx, 0) == MAPS_OK);
  CHECK(maps_context_set_dtw(nullptr, 1) == MAPS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("numeric primitives") {
  Context c;
  double h = -1.0;
  const double one = 1.0, four = 4.0;
  REQUIRE(maps_hellinger_gp(c.ctx, &one, &four, 1, &h) == MAPS_OK);
  CHECK(h == doctest::Approx(0.324920).epsilon(1e-6));
  CHECK(maps_hellinger_gp(c.ctx, &one, &four, 0, &h) == MAPS_ERR_INVALID_ARGUMENT);

  const double x[8] = {0, 0, 0, 0, 1, 0, 0, 0};
  const double w = 1.0;
  double lml = 0.0;
  REQUIRE(maps_log_marginal_likelihood(c.ctx, &w, x, 1, 1.0, 1.0, 0.5, &lml) == MAPS_OK);
  CHECK(lml == doctest::Approx(-1.455005).epsilon(1e-6));
  CHECK(maps_log_marginal_likelihood(c.ctx, &w, x, 1, -1.0, 1.0, 0.5, &lml) ==
        MAPS_ERR_INVALID_ARGUMENT);

  const double qa[4] = {1, 0, 0, 0};
  const double qb[4] = {-1, 0, 0, 0};
  CHECK(maps_quaternion_sq_angle(qa, qb) == 0.0);
}

TEST_CASE("generate, train, assess and evaluate through the C interface") {
  Context c;
  Scratch dir("flow");
  const maps_scenario sc = small(3);
  REQUIRE(maps_generate(c.ctx, &sc, dir.str("data").c_str(), 0) == MAPS_OK);
  CHECK(fs::exists(dir.path / "data" / "manifest.json"));
  CHECK(maps_generate(c.ctx, &sc, dir.str("data").c_str(), 0) == MAPS_ERR_IO);

  maps_train_summary summary{};
  REQUIRE(maps_train(c.ctx, dir.str("data").c_str(), dir.str("model.json").c_str(), &summary) ==
          MAPS_OK);
  CHECK(summary.n_reps == 6);
  CHECK(summary.n_success == 3);
  CHECK(summary.n_failure == 3);
  CHECK(summary.gp_fit_seconds > 0.0);

  REQUIRE(maps_generate_reproduction(c.ctx, &sc, MAPS_FAILURE_NONE, 50,
                                     dir.str("held.csv").c_str()) == MAPS_OK);
  maps_assessment a{};
  REQUIRE(maps_assess(c.ctx, dir.str("data").c_str(), dir.str("model.json").c_str(),
                      dir.str("held.csv").c_str(), &a) == MAPS_OK);
  CHECK(a.predicted == MAPS_SUCCESS);
  CHECK(a.p_success > 0.5);
  double sum = 0.0;
  for (double m : a.features)
    sum += m;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(maps_assess(c.ctx, dir.str("data").c_str(), dir.str("model.json").c_str(),
                    dir.str("nope.csv").c_str(), &a) == MAPS_ERR_IO);

  const std::string data = dir.str("data");
  const char *dirs[] = {data.c_str()};
  maps_report *report = nullptr;
  REQUIRE(maps_evaluate(c.ctx, dirs, 1, MAPS_EVAL_LOOCV, &report) == MAPS_OK);
  CHECK(maps_report_size(report) == 6);
  uint64_t counts[4];
  maps_report_confusion(report, counts);
  CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 6);
  CHECK(maps_report_accuracy(report) == static_cast<double>(counts[0] + counts[3]) / 6.0);
  maps_assessment e{};
  REQUIRE(maps_report_entry(report, 0, &e) == MAPS_OK);
  CHECK(e.has_actual == 1);
  CHECK(maps_report_entry(report, 6, &e) == MAPS_ERR_INVALID_ARGUMENT);
  REQUIRE(maps_report_dataset_count(report) == 1);
  const char *name = nullptr;
  uint64_t n = 0;
  double acc = 0.0;
  CHECK(maps_report_dataset(report, 0, &name, &n, &acc) == MAPS_OK);
  CHECK(std::string(name) == "data");
  CHECK(n == 6);

  bool saw_fit = false;
  for (size_t i = 0; i < maps_report_timing_count(report); ++i) {
    const char *stage = nullptr;
    double secs = -1.0;
    REQUIRE(maps_report_timing(report, i, &stage, &secs) == MAPS_OK);
    CHECK(secs >= 0.0);
    saw_fit = saw_fit || std::string(stage) == "gp_fit";
  }
  CHECK(saw_fit);

  char *text = nullptr;
  REQUIRE(maps_report_render(report, MAPS_FORMAT_JSON, 0, &text) == MAPS_OK);
  CHECK(std::string(text).find("\"accuracy\"") != std::string::npos);
  maps_string_free(text);
  REQUIRE(maps_report_write(c.ctx, report, dir.str("report").c_str()) == MAPS_OK);
  CHECK(fs::exists(dir.path / "report" / "report.json"));
  maps_report_destroy(report);

  report = nullptr;
  CHECK(maps_evaluate(c.ctx, dirs, 1, MAPS_EVAL_CROSS_DEMO, &report) ==
        MAPS_ERR_INVALID_ARGUMENT);
  CHECK(report == nullptr);
}

TEST_CASE("training error codes") {
  Context c;
  Scratch dir("errors");
  maps_scenario sc = small(4);
  sc.n_failure = 0;
  REQUIRE(maps_generate(c.ctx, &sc, dir.str("one_class").c_str(), 0) == MAPS_OK);
  CHECK(maps_train(c.ctx, dir.str("one_class").c_str(), dir.str("m.json").c_str(), nullptr) ==
        MAPS_ERR_TRAINING);
  CHECK(std::string(maps_context_last_error(c.ctx)).find("failure") != std::string::npos);

  fs::create_directories(dir.path / "empty" / "demo");
  CHECK(maps_train(c.ctx, dir.str("empty").c_str(), dir.str("m.json").c_str(), nullptr) ==
        MAPS_ERR_MISSING_DEMO);
  CHECK(maps_train(c.ctx, nullptr, "m.json", nullptr) == MAPS_ERR_INVALID_ARGUMENT);
}
