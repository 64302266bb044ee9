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

#ifndef MAPS_SIMILARITY_HPP
#define MAPS_SIMILARITY_HPP

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maps/gp_model.hpp"

namespace maps {

struct FeatureVector {
  std::array<double, 6> m{};     // normalized, sums to 1
  std::array<double, 6> raw_h{}; // per-component Hellinger distances
  bool degenerate = false;       // total dissimilarity below 1e-12
};

inline constexpr double kDegenerateTotal = 1e-12;

/// Hellinger distance between N(0, k_demo) and N(0, k_rep), evaluated in
/// log-determinant space and clamped to [0, 1].
double hellinger_gp(const Eigen::MatrixXd &k_demo, const Eigen::MatrixXd &k_rep);

/// Same, reusing known log-determinants of the two matrices.
double hellinger_gp(const Eigen::MatrixXd &k_demo, double log_det_demo,
                    const Eigen::MatrixXd &k_rep, double log_det_rep);

FeatureVector normalize_features(const std::array<double, 6> &raw_h);

FeatureVector extract_features(const WrenchModelSet &demo_set,
                               const WrenchModelSet &rep_set);

struct FeatureRow {
  std::string trajectory_id;
  FeatureVector features;
  std::optional<Label> label;
};

/// trajectory_id,m1,...,m6,label
void write_features_csv(std::ostream &out, const std::vector<FeatureRow> &rows);

} // namespace maps

#endif
