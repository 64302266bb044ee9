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
#include <random>
#include <vector>

#include "maps/classifier.hpp"
#include "maps/error.hpp"

using namespace maps;

namespace {

FeatureVector fv(std::array<double, 6> m) {
  FeatureVector f;
  f.m = m;
  f.raw_h = m;
  return f;
}

const std::array<double, 6> kUniform = {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};

ClassStats stats(double mu0, double sigma0, double prior) {
  ClassStats s;
  s.mu.fill(0.2);
  s.sigma.fill(0.05);
  s.mu[0] = mu0;
  s.sigma[0] = sigma0;
  s.prior = prior;
  s.count = 1;
  return s;
}

// Two well separated clusters around distinct feature patterns.
void separable_set(std::size_t per_class, std::uint64_t seed, std::vector<FeatureVector> &x,
                   std::vector<Label> &y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.01);
  for (std::size_t i = 0; i < per_class; ++i) {
    x.push_back(fv({0.1 + n(rng), 0.2 + n(rng), 0.2, 0.2, 0.2, 0.1}));
    y.push_back(Label::Success);
    x.push_back(fv({0.4 + n(rng), 0.1 + n(rng), 0.1, 0.1, 0.2, 0.1}));
    y.push_back(Label::Failure);
  }
}

} // namespace

TEST_CASE("constant-feature classes") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 3; ++i) {
    x.push_back(fv(kUniform));
    y.push_back(Label::Success);
    x.push_back(fv({0.5, 0.1, 0.1, 0.1, 0.1, 0.1}));
    y.push_back(Label::Failure);
  }
  const NaiveBayesModel m = train_classifier(x, y);
  CHECK(m.success.prior == doctest::Approx(0.5));
  CHECK(m.failure.prior == doctest::Approx(0.5));
  for (int k = 0; k < 6; ++k) {
    CHECK(m.success.mu[k] == doctest::Approx(1.0 / 6.0));
    CHECK(m.success.sigma[k] == kDefaultSigmaFloor);
    CHECK(m.failure.sigma[k] == kDefaultSigmaFloor);
  }
  CHECK(m.failure.mu[0] == doctest::Approx(0.5));
  CHECK(m.success.count == 3);
}

TEST_CASE("a single failure instance still trains") {
  std::vector<FeatureVector> x = {fv(kUniform), fv({0.2, 0.2, 0.1, 0.2, 0.2, 0.1}),
                                  fv({0.5, 0.1, 0.1, 0.1, 0.1, 0.1})};
  std::vector<Label> y = {Label::Success, Label::Success, Label::Failure};
  const NaiveBayesModel m = train_classifier(x, y);
  CHECK(m.failure.count == 1);
  for (double s : m.failure.sigma)
    CHECK(s == kDefaultSigmaFloor);
  CHECK(m.success.prior + m.failure.prior == doctest::Approx(1.0));
}

TEST_CASE("a missing class is a training error naming it") {
  std::vector<FeatureVector> x = {fv(kUniform), fv(kUniform)};
  std::vector<Label> y = {Label::Success, Label::Success};
  try {
    train_classifier(x, y);
    FAIL("expected a training error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Training);
    CHECK(std::string(e.what()).find("failure") != std::string::npos);
  }
}

TEST_CASE("priors are label frequencies and variances are MLE") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(fv({0.1 * (i % 4), 0.2, 0.2, 0.2, 0.2, 0.1}));
    y.push_back(i < 13 ? Label::Success : Label::Failure);
  }
  const NaiveBayesModel m = train_classifier(x, y);
  CHECK(m.success.prior == 13.0 / 20.0);
  CHECK(m.failure.prior == 7.0 / 20.0);
  // Success feature 0 over i = 0..12: values 0, .1, .2, .3 repeating.
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < 13; ++i)
    mean += 0.1 * (i % 4);
  mean /= 13.0;
  for (int i = 0; i < 13; ++i)
    var += std::pow(0.1 * (i % 4) - mean, 2);
  var /= 13.0;
  CHECK(m.success.mu[0] == doctest::Approx(mean).epsilon(1e-12));
  CHECK(m.success.sigma[0] == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("density ratio example") {
  NaiveBayesModel m{stats(0.1, 0.05, 0.5), stats(0.3, 0.05, 0.5)};
  FeatureVector x = fv({0.1, 0.2, 0.2, 0.2, 0.2, 0.2});
  const Assessment a = classify(m, x);
  CHECK(a.p_success == doctest::Approx(1.0 / (1.0 + std::exp(-8.0))).epsilon(1e-12));
  CHECK(a.p_success == doctest::Approx(0.999665).epsilon(1e-6));
  CHECK(a.predicted == Label::Success);
}

TEST_CASE("ties resolve to success") {
  // Dyadic values keep the two distances exactly equal.
  NaiveBayesModel m{stats(0.125, 0.0625, 0.5), stats(0.375, 0.0625, 0.5)};
  const Assessment a = classify(m, fv({0.25, 0.2, 0.2, 0.2, 0.2, 0.2}));
  CHECK(a.p_success == 0.5);
  CHECK(a.predicted == Label::Success);
}

TEST_CASE("identical likelihoods return the prior") {
  NaiveBayesModel m{stats(0.2, 0.05, 0.9), stats(0.2, 0.05, 0.1)};
  CHECK(classify(m, fv({0.7, 0.1, 0, 0, 0.1, 0.1})).p_success == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("posterior normalization") {
  CHECK(posterior_success(-1000.0, -1000.0) == doctest::Approx(0.5));
  CHECK(posterior_success(0.0, -2000.0) == 1.0);
  CHECK(posterior_success(-2000.0, 0.0) >= 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double ls = u(rng), lf = u(rng), shift = 1e3 * u(rng);
    const double p = posterior_success(ls, lf);
    const double q = posterior_success(lf, ls);
    CHECK(p + q == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(posterior_success(ls + shift, lf + shift) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("class log score is the prior plus Gaussian log densities") {
  const ClassStats s = stats(0.1, 0.05, 0.25);
  const FeatureVector x = fv({0.15, 0.2, 0.25, 0.2, 0.2, 0.2});
  double want = std::log(0.25);
  for (int k = 0; k < 6; ++k) {
    const double z = (x.m[k] - s.mu[k]) / s.sigma[k];
    want += -0.5 * z * z - std::log(s.sigma[k]) - 0.5 * std::log(2.0 * M_PI);
  }
  CHECK(class_log_score(s, x) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("non-finite features are rejected") {
  NaiveBayesModel m{stats(0.1, 0.05, 0.5), stats(0.3, 0.05, 0.5)};
  CHECK_THROWS_AS(classify(m, fv({NAN, 0, 0, 0, 0, 0})), Error);
}

TEST_CASE("duplicating every training instance changes nothing") {
  std::vector<FeatureVector> x, probe;
  std::vector<Label> y;
  separable_set(6, 9, x, y);
  separable_set(4, 10, probe, y);
  y.resize(x.size());
  std::vector<FeatureVector> x2 = x;
  x2.insert(x2.end(), x.begin(), x.end());
  std::vector<Label> y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const NaiveBayesModel a = train_classifier(x, y);
  const NaiveBayesModel b = train_classifier(x2, y2);
  for (int k = 0; k < 6; ++k) {
    CHECK(a.success.mu[k] == doctest::Approx(b.success.mu[k]).epsilon(1e-12));
    CHECK(a.failure.sigma[k] == doctest::Approx(b.failure.sigma[k]).epsilon(1e-12));
  }
  CHECK(a.success.prior == b.success.prior);
  for (const auto &p : probe) {
    const Assessment pa = classify(a, p), pb = classify(b, p);
    CHECK(pa.predicted == pb.predicted);
    CHECK(pa.p_success == doctest::Approx(pb.p_success).epsilon(1e-9));
  }
}

TEST_CASE("LOOCV on separable classes is perfect") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  separable_set(10, 1, x, y);
  const LoocvResult r = evaluate_loocv(x, y);
  CHECK(r.accuracy == 1.0);
  CHECK(r.folds == 20);
  CHECK(r.skipped == 0);
  CHECK(r.confusion.counts[0][1] == 0);
  CHECK(r.confusion.counts[1][0] == 0);
  CHECK(r.confusion.total() == 20);
  CHECK(r.predictions.size() == 20);
}

TEST_CASE("LOOCV on permuted labels still reports") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  separable_set(10, 2, x, y);
  std::mt19937_64 rng(77);
  std::shuffle(y.begin(), y.end(), rng);
  const LoocvResult r = evaluate_loocv(x, y);
  CHECK(r.folds == 20);
  CHECK(r.confusion.total() == 20);
  CHECK(r.accuracy >= 0.0);
  CHECK(r.accuracy <= 1.0);
}

TEST_CASE("LOOCV with fifteen instances and a lone failure") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  separable_set(7, 3, x, y);
  x.push_back(fv({0.1, 0.2, 0.2, 0.2, 0.2, 0.1}));
  y.push_back(Label::Success);
  REQUIRE(x.size() == 15);
  const LoocvResult r = evaluate_loocv(x, y);
  CHECK(r.confusion.total() == 15);
  CHECK(r.folds == 15);

  // Holding out a class's only member leaves a class empty; that fold is skipped.
  std::vector<FeatureVector> lone(x.begin(), x.begin() + 3);
  std::vector<Label> lone_y(y.begin(), y.begin() + 3);
  lone_y = {Label::Success, Label::Failure, Label::Success};
  const LoocvResult s = evaluate_loocv(lone, lone_y);
  CHECK(s.skipped == 1);
  CHECK(s.folds == 2);
  CHECK(s.confusion.total() == 2);
}

TEST_CASE("LOOCV keeps trajectory ids") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  separable_set(3, 4, x, y);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < x.size(); ++i)
    ids.push_back("t" + std::to_string(i));
  const LoocvResult r = evaluate_loocv(x, y, ids);
  for (std::size_t i = 0; i < r.predictions.size(); ++i)
    CHECK(r.predictions[i].assessment.trajectory_id == ids[i]);
}

TEST_CASE("confusion matrix bookkeeping") {
  ConfusionMatrix c;
  CHECK(c.accuracy() == 0.0);
  c.add(Label::Success, Label::Success);
  c.add(Label::Success, Label::Failure);
  c.add(Label::Failure, Label::Failure);
  c.add(Label::Failure, Label::Failure);
  CHECK(c.total() == 4);
  CHECK(c.counts[0][1] == 1);
  CHECK(c.accuracy() == 0.75);
}

TEST_CASE("classifier JSON round trip") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  separable_set(5, 5, x, y);
  const NaiveBayesModel m = train_classifier(x, y);
  const auto j = classifier_to_json(m);
  CHECK(j.at("success").at("mu").size() == 6);
  CHECK(j.at("failure").at("count").get<std::uint64_t>() == 5);
  const NaiveBayesModel back = classifier_from_json(j);
  for (int k = 0; k < 6; ++k) {
    CHECK(back.success.mu[k] == m.success.mu[k]);
    CHECK(back.failure.sigma[k] == m.failure.sigma[k]);
  }
  auto bad = j;
  bad["success"]["sigma"][0] = -1.0;
  CHECK_THROWS_AS(classifier_from_json(bad), Error);
  CHECK_THROWS_AS(classifier_from_json(nlohmann::json::object()), Error);
}
