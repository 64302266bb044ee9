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

#include "maps/classifier.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "maps/error.hpp"

namespace maps {

namespace {

ClassStats fit_class(std::span<const FeatureVector> features,
                     std::span<const Label> labels, Label which,
                     double sigma_floor) {
  ClassStats s;
  std::array<double, 6> sum{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (labels[i] != which)
      continue;
    ++s.count;
    for (std::size_t k = 0; k < 6; ++k)
      sum[k] += features[i].m[k];
  }
  if (s.count == 0)
    throw Error(ErrorKind::Training,
                std::string("no training instances for class '") +
                    label_name(which) + "'");
  const double n = static_cast<double>(s.count);
  for (std::size_t k = 0; k < 6; ++k)
    s.mu[k] = sum[k] / n;

  std::array<double, 6> ss{};
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (labels[i] != which)
      continue;
    for (std::size_t k = 0; k < 6; ++k) {
      const double d = features[i].m[k] - s.mu[k];
      ss[k] += d * d;
    }
  }
  for (std::size_t k = 0; k < 6; ++k)
    s.sigma[k] = std::max(std::sqrt(ss[k] / n), sigma_floor);
  s.prior = n / static_cast<double>(features.size());
  return s;
}

} // namespace

NaiveBayesModel train_classifier(std::span<const FeatureVector> features,
                                 std::span<const Label> labels,
                                 double sigma_floor) {
  if (features.size() != labels.size())
    throw Error(ErrorKind::Contract, "features and labels differ in length");
  if (!(sigma_floor > 0.0))
    throw Error(ErrorKind::Contract, "variance floor must be positive");
  NaiveBayesModel model;
  model.success = fit_class(features, labels, Label::Success, sigma_floor);
  model.failure = fit_class(features, labels, Label::Failure, sigma_floor);
  return model;
}

double class_log_score(const ClassStats &stats, const FeatureVector &m) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double score = std::log(stats.prior);
  for (std::size_t k = 0; k < 6; ++k) {
    const double z = (m.m[k] - stats.mu[k]) / stats.sigma[k];
    score += -0.5 * z * z - std::log(stats.sigma[k]) - half_log_2pi;
  }
  return score;
}

double posterior_success(double log_success, double log_failure) {
  // Logistic form of the two-class log-sum-exp; exact 0.5 on equal scores.
  return 1.0 / (1.0 + std::exp(log_failure - log_success));
}

Assessment classify(const NaiveBayesModel &model, const FeatureVector &m_star,
                    std::string trajectory_id) {
  for (double v : m_star.m)
    if (!std::isfinite(v))
      throw Error(ErrorKind::Contract, "feature vector has a non-finite entry");
  Assessment a;
  a.trajectory_id = std::move(trajectory_id);
  a.features = m_star;
  const double ls = class_log_score(model.success, m_star);
  const double lf = class_log_score(model.failure, m_star);
  a.p_success = posterior_success(ls, lf);
  a.predicted = ls >= lf ? Label::Success : Label::Failure;
  return a;
}

void ConfusionMatrix::add(Label actual, Label predicted) {
  ++counts[actual == Label::Success ? 0 : 1][predicted == Label::Success ? 0 : 1];
}

std::uint64_t ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  return n == 0 ? 0.0
                : static_cast<double>(counts[0][0] + counts[1][1]) /
                      static_cast<double>(n);
}

LoocvResult evaluate_loocv(std::span<const FeatureVector> features,
                           std::span<const Label> labels,
                           std::span<const std::string> ids,
                           double sigma_floor) {
  if (features.size() != labels.size())
    throw Error(ErrorKind::Contract, "features and labels differ in length");
  if (!ids.empty() && ids.size() != features.size())
    throw Error(ErrorKind::Contract, "ids and features differ in length");

  std::size_t n_success = 0;
  for (Label l : labels)
    n_success += l == Label::Success;
  const std::size_t n_failure = labels.size() - n_success;

  LoocvResult result;
  std::vector<FeatureVector> train_f;
  std::vector<Label> train_l;
  for (std::size_t held = 0; held < features.size(); ++held) {
    const std::size_t left_success = n_success - (labels[held] == Label::Success);
    const std::size_t left_failure = n_failure - (labels[held] == Label::Failure);
    if (left_success == 0 || left_failure == 0) {
      std::cerr << "warning: skipping LOOCV fold " << held
                << ": training set would lack a class\n";
      ++result.skipped;
      continue;
    }
    train_f.clear();
    train_l.clear();
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (i == held)
        continue;
      train_f.push_back(features[i]);
      train_l.push_back(labels[i]);
    }
    const auto model = train_classifier(train_f, train_l, sigma_floor);
    auto a = classify(model, features[held], ids.empty() ? std::to_string(held) : ids[held]);
    result.confusion.add(labels[held], a.predicted);
    result.predictions.push_back({std::move(a), labels[held]});
    ++result.folds;
  }
  result.accuracy = result.confusion.accuracy();
  return result;
}

namespace {

nlohmann::json stats_to_json(const ClassStats &s) {
  return {{"prior", s.prior}, {"mu", s.mu}, {"sigma", s.sigma}, {"count", s.count}};
}

ClassStats stats_from_json(const nlohmann::json &j) {
  ClassStats s;
  s.prior = j.at("prior").get<double>();
  s.mu = j.at("mu").get<std::array<double, 6>>();
  s.sigma = j.at("sigma").get<std::array<double, 6>>();
  s.count = j.at("count").get<std::uint64_t>();
  if (!(s.prior > 0.0 && s.prior < 1.0) || s.count == 0)
    throw Error(ErrorKind::Ingest, "class prior must lie in (0, 1) with count >= 1");
  for (double v : s.sigma)
    if (!(v > 0.0))
      throw Error(ErrorKind::Ingest, "class sigma must be positive");
  return s;
}

} // namespace

nlohmann::json classifier_to_json(const NaiveBayesModel &model) {
  return {{"success", stats_to_json(model.success)},
          {"failure", stats_to_json(model.failure)}};
}

NaiveBayesModel classifier_from_json(const nlohmann::json &j) {
  try {
    return {stats_from_json(j.at("success")), stats_from_json(j.at("failure"))};
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::Ingest, std::string("bad classifier model: ") + e.what());
  }
}

} // namespace maps
