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

#include "maps/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <Eigen/Cholesky>

#include "maps/error.hpp"

namespace maps {

namespace {

double log_det_spd(const Eigen::MatrixXd &m, const char *what) {
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::Numerical,
                std::string("hellinger: Cholesky failed for ") + what);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

} // namespace

double hellinger_gp(const Eigen::MatrixXd &k_demo, double log_det_demo,
                    const Eigen::MatrixXd &k_rep, double log_det_rep) {
  if (k_demo.rows() != k_demo.cols() || k_rep.rows() != k_rep.cols() ||
      k_demo.rows() != k_rep.rows())
    throw Error(ErrorKind::Contract, "hellinger: covariance dimensions differ");
  const double log_det_avg =
      log_det_spd(0.5 * (k_demo + k_rep), "the average covariance");
  const double log_bc = 0.25 * (log_det_demo + log_det_rep) - 0.5 * log_det_avg;
  const double h2 = 1.0 - std::exp(std::min(log_bc, 0.0));
  return std::clamp(std::sqrt(std::max(h2, 0.0)), 0.0, 1.0);
}

double hellinger_gp(const Eigen::MatrixXd &k_demo, const Eigen::MatrixXd &k_rep) {
  if (k_demo.rows() != k_rep.rows() || k_demo.cols() != k_rep.cols())
    throw Error(ErrorKind::Contract, "hellinger: covariance dimensions differ");
  return hellinger_gp(k_demo, log_det_spd(k_demo, "the first covariance"), k_rep,
                      log_det_spd(k_rep, "the second covariance"));
}

FeatureVector normalize_features(const std::array<double, 6> &raw_h) {
  FeatureVector f;
  f.raw_h = raw_h;
  double total = 0.0;
  for (double h : raw_h)
    total += h;
  if (total < kDegenerateTotal) {
    f.m.fill(1.0 / 6.0);
    f.degenerate = true;
    return f;
  }
  for (std::size_t k = 0; k < raw_h.size(); ++k)
    f.m[k] = raw_h[k] / total;
  return f;
}

FeatureVector extract_features(const WrenchModelSet &demo_set,
                               const WrenchModelSet &rep_set) {
  std::array<double, 6> raw{};
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const auto &a = demo_set.models[k].cov;
    const auto &b = rep_set.models[k].cov;
    if (a.matrix.rows() != b.matrix.rows())
      throw Error(ErrorKind::Contract,
                  "demo and reproduction models differ in sample count");
    raw[k] = hellinger_gp(a.matrix, a.log_det, b.matrix, b.log_det);
  }
  return normalize_features(raw);
}

void write_features_csv(std::ostream &out, const std::vector<FeatureRow> &rows) {
  out << "trajectory_id,m1,m2,m3,m4,m5,m6,label\n";
  char buf[64];
  for (const auto &row : rows) {
    out << row.trajectory_id;
    for (double v : row.features.m) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << ',' << (row.label ? label_name(*row.label) : "") << '\n';
  }
}

} // namespace maps
