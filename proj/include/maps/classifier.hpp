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

#ifndef MAPS_CLASSIFIER_HPP
#define MAPS_CLASSIFIER_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "maps/similarity.hpp"
#include "maps/trajectory.hpp"

namespace maps {

inline constexpr double kDefaultSigmaFloor = 1e-4;

struct ClassStats {
  std::array<double, 6> mu{};
  std::array<double, 6> sigma{};
  double prior = 0.0;
  std::uint64_t count = 0;
};

struct NaiveBayesModel {
  ClassStats success;
  ClassStats failure;

  const ClassStats &stats(Label l) const {
    return l == Label::Success ? success : failure;
  }
};

struct Assessment {
  std::string trajectory_id;
  double p_success = 0.0;
  Label predicted = Label::Success;
  FeatureVector features;
};

/// Gaussian Naive Bayes with maximum-likelihood (1/n) variances. Each
/// standard deviation is floored at `sigma_floor`; priors are class
/// frequencies. Throws Error(Training) when a class has no instances.
NaiveBayesModel train_classifier(std::span<const FeatureVector> features,
                                 std::span<const Label> labels,
                                 double sigma_floor = kDefaultSigmaFloor);

/// ln p(c) + sum_k ln N(m_k; mu, sigma) for one class.
double class_log_score(const ClassStats &stats, const FeatureVector &m);

/// Posterior of success from the two class log-scores (log-sum-exp).
double posterior_success(double log_success, double log_failure);

/// Ties (p_success == 0.5) resolve to Success.
Assessment classify(const NaiveBayesModel &model, const FeatureVector &m_star,
                    std::string trajectory_id = {});

struct ConfusionMatrix {
  // counts[actual][predicted], index 0 = success, 1 = failure
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  void add(Label actual, Label predicted);
  std::uint64_t total() const;
  double accuracy() const; // trace / total, 0 when empty
};

struct LabeledAssessment {
  Assessment assessment;
  Label actual;
};

struct LoocvResult {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  std::size_t folds = 0;   // train/classify cycles performed
  std::size_t skipped = 0; // folds that would leave a class empty
  std::vector<LabeledAssessment> predictions;
};

LoocvResult evaluate_loocv(std::span<const FeatureVector> features,
                           std::span<const Label> labels,
                           std::span<const std::string> ids = {},
                           double sigma_floor = kDefaultSigmaFloor);

nlohmann::json classifier_to_json(const NaiveBayesModel &model);
NaiveBayesModel classifier_from_json(const nlohmann::json &j);

} // namespace maps

#endif
