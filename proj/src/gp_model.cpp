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

#include "maps/gp_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "maps/error.hpp"
#include "maps/nelder_mead.hpp"
#include "maps/parallel.hpp"

namespace maps {

double quaternion_sq_angle(const Eigen::Ref<const Eigen::Vector4d> &qa,
                           const Eigen::Ref<const Eigen::Vector4d> &qb) {
  // Angle between the 4-vectors, on the hemisphere closest to qa. The
  // atan2 form is exact at zero where arccos(|qa.qb|) loses half the digits.
  const Eigen::Vector4d b = qa.dot(qb) < 0.0 ? Eigen::Vector4d(-qb) : Eigen::Vector4d(qb);
  const double half = std::atan2((qa - b).norm(), (qa + b).norm());
  const double angle = 4.0 * half;
  return angle * angle;
}

double quaternion_sq_angle(const Eigen::Quaterniond &qa,
                           const Eigen::Quaterniond &qb) {
  return quaternion_sq_angle(Eigen::Vector4d(qa.w(), qa.x(), qa.y(), qa.z()),
                             Eigen::Vector4d(qb.w(), qb.x(), qb.y(), qb.z()));
}

double input_sq_distance(const Eigen::Ref<const Eigen::RowVectorXd> &dn,
                         const Eigen::Ref<const Eigen::RowVectorXd> &dm) {
  const double dt = dn(0) - dm(0);
  const double dx = (dn.segment<3>(1) - dm.segment<3>(1)).squaredNorm();
  return dt * dt + dx +
         quaternion_sq_angle(dn.segment<4>(4).transpose(), dm.segment<4>(4).transpose());
}

double kernel_entry(const Eigen::Ref<const Eigen::RowVectorXd> &dn,
                    const Eigen::Ref<const Eigen::RowVectorXd> &dm,
                    const KernelParams &p, bool same_index) {
  const double k = p.theta0 * std::exp(-0.5 * p.theta1 * input_sq_distance(dn, dm));
  return same_index ? k + p.sigma2 : k;
}

Eigen::MatrixXd input_sq_distances(const Eigen::MatrixXd &inputs) {
  if (inputs.cols() != kInputDim)
    throw Error(ErrorKind::Contract, "inputs must have 8 columns");
  const Eigen::Index n = inputs.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      d(i, j) = input_sq_distance(inputs.row(i), inputs.row(j));
      d(j, i) = d(i, j);
    }
  }
  return d;
}

Covariance covariance_from_distances(const Eigen::MatrixXd &sq_dist,
                                     const KernelParams &p) {
  const Eigen::Index n = sq_dist.rows();
  if (n < 1)
    throw Error(ErrorKind::Contract, "covariance needs at least one input");

  Covariance cov;
  cov.matrix.resize(n, n);
  const double scale = -0.5 * p.theta1;
  for (Eigen::Index j = 0; j < n; ++j) {
    cov.matrix(j, j) = p.theta0 + p.sigma2;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double k = p.theta0 * std::exp(scale * sq_dist(i, j));
      cov.matrix(i, j) = k;
      cov.matrix(j, i) = k;
    }
  }

  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(cov.matrix);
  double jitter = 0.0;
  if (llt.info() != Eigen::Success) {
    for (double rel = kJitterStart; rel <= kJitterMax * (1.0 + 1e-9); rel *= 10.0) {
      jitter = rel * p.theta0;
      Eigen::MatrixXd jittered = cov.matrix;
      jittered.diagonal().array() += jitter;
      llt.compute(jittered);
      if (llt.info() == Eigen::Success) {
        cov.matrix = std::move(jittered);
        break;
      }
    }
    if (llt.info() != Eigen::Success) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "Cholesky failed after max jitter (n=%ld, theta0=%.6g, "
                    "theta1=%.6g, sigma2=%.6g, jitter=%.3g)",
                    static_cast<long>(n), p.theta0, p.theta1, p.sigma2, jitter);
      throw Error(ErrorKind::Numerical, buf);
    }
  }
  cov.jitter = jitter;
  cov.chol = llt.matrixL();
  cov.log_det = 2.0 * cov.chol.diagonal().array().log().sum();
  if (!std::isfinite(cov.log_det))
    throw Error(ErrorKind::Numerical, "non-finite log-determinant");
  return cov;
}

Covariance build_covariance(const Eigen::MatrixXd &inputs, const KernelParams &p) {
  return covariance_from_distances(input_sq_distances(inputs), p);
}

double log_marginal_likelihood(const Eigen::VectorXd &targets,
                               const Covariance &cov) {
  if (targets.size() != cov.chol.rows())
    throw Error(ErrorKind::Contract, "targets and covariance differ in size");
  const Eigen::VectorXd alpha =
      cov.chol.triangularView<Eigen::Lower>().solve(targets);
  const double n = static_cast<double>(targets.size());
  return -0.5 * cov.log_det - 0.5 * alpha.squaredNorm() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

double log_marginal_likelihood(const Eigen::VectorXd &targets,
                               const Eigen::MatrixXd &inputs,
                               const KernelParams &p) {
  if (targets.size() != inputs.rows())
    throw Error(ErrorKind::Contract, "targets and inputs differ in length");
  return log_marginal_likelihood(targets, build_covariance(inputs, p));
}

std::array<Eigen::Vector3d, 4> fit_start_points(const Eigen::VectorXd &targets) {
  constexpr double eps = 1e-8;
  double var = 0.0;
  if (targets.size() > 0) {
    const double mean = targets.mean();
    var = (targets.array() - mean).square().mean();
  }
  const double ln_var = std::log(std::max(var, 0.0) + eps);
  const double ln_noise = std::log(0.1 * std::max(var, 0.0) + eps);
  return {Eigen::Vector3d(ln_var, 0.0, ln_noise),
          Eigen::Vector3d(ln_var, std::log(10.0), ln_noise),
          Eigen::Vector3d(0.0, 0.0, ln_noise),
          Eigen::Vector3d(0.0, std::log(10.0), ln_noise)};
}

namespace {

KernelParams from_log(const Eigen::Vector3d &v) {
  return {std::exp(v(0)), std::exp(v(1)), std::exp(v(2))};
}

} // namespace

GpWrenchModel make_wrench_model(std::shared_ptr<const Eigen::MatrixXd> inputs,
                                const Eigen::VectorXd &targets,
                                const KernelParams &params) {
  GpWrenchModel model;
  model.params = params;
  model.targets = targets;
  model.cov = build_covariance(*inputs, params);
  model.lml = log_marginal_likelihood(targets, model.cov);
  model.inputs = std::move(inputs);
  return model;
}

GpWrenchModel fit_wrench_model(std::shared_ptr<const Eigen::MatrixXd> inputs,
                               const Eigen::MatrixXd &sq_dist,
                               const Eigen::VectorXd &targets,
                               const FitOptions &options) {
  if (inputs->rows() < 2)
    throw Error(ErrorKind::Contract, "fit needs at least 2 samples");
  if (targets.size() != inputs->rows())
    throw Error(ErrorKind::Contract, "targets and inputs differ in length");
  if (!targets.allFinite())
    throw Error(ErrorKind::Contract, "targets must be finite");

  auto objective = [&](const Eigen::Vector3d &v) {
    try {
      return -log_marginal_likelihood(targets,
                                      covariance_from_distances(sq_dist, from_log(v)));
    } catch (const Error &) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const NelderMead<3> optimizer(Eigen::Vector3d(kLogParamMin[0], kLogParamMin[1], kLogParamMin[2]),
                                Eigen::Vector3d(kLogParamMax[0], kLogParamMax[1], kLogParamMax[2]));
  bool found = false;
  Eigen::Vector3d best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto &start : fit_start_points(targets)) {
    const auto r = optimizer.minimize(objective, start, options.initial_step,
                                      options.tolerance, options.max_iterations);
    if (std::isfinite(r.value) && (!found || r.value < best_value)) {
      found = true;
      best = r.x;
      best_value = r.value;
    }
  }
  if (!found)
    throw Error(ErrorKind::Fit, "every optimizer start failed numerically");

  GpWrenchModel model;
  model.params = from_log(best);
  model.targets = targets;
  model.cov = covariance_from_distances(sq_dist, model.params);
  model.lml = log_marginal_likelihood(targets, model.cov);
  model.inputs = std::move(inputs);
  return model;
}

GpWrenchModel fit_wrench_model(const Eigen::MatrixXd &inputs,
                               const Eigen::VectorXd &targets,
                               const FitOptions &options) {
  auto shared = std::make_shared<const Eigen::MatrixXd>(inputs);
  return fit_wrench_model(shared, input_sq_distances(inputs), targets, options);
}

WrenchModelSet fit_model_set(const Eigen::MatrixXd &inputs,
                             const Eigen::MatrixXd &wrench, bool parallel) {
  if (wrench.cols() != kWrenchDim || wrench.rows() != inputs.rows())
    throw Error(ErrorKind::Contract, "wrench must be N x 6 over the same N as inputs");
  auto shared = std::make_shared<const Eigen::MatrixXd>(inputs);
  const Eigen::MatrixXd sq_dist = input_sq_distances(inputs);
  WrenchModelSet set;
  parallel_for(kWrenchDim, parallel, [&](std::size_t k) {
    try {
      set.models[k] = fit_wrench_model(shared, sq_dist,
                                       wrench.col(static_cast<Eigen::Index>(k)));
    } catch (const Error &e) {
      throw Error(e.kind(), "wrench component " + std::to_string(k + 1) + " (" +
                                kWrenchNames[k] + "): " + e.what());
    }
  });
  return set;
}

std::uint64_t content_hash(const Eigen::MatrixXd &m) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void *data, std::size_t len) {
    const auto *bytes = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t shape[2] = {m.rows(), m.cols()};
  mix(shape, sizeof shape);
  mix(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

nlohmann::json model_set_to_json(const WrenchModelSet &set) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t k = 0; k < set.models.size(); ++k) {
    const auto &m = set.models[k];
    j[kWrenchNames[k]] = {{"theta0", m.params.theta0},
                          {"theta1", m.params.theta1},
                          {"sigma2", m.params.sigma2},
                          {"jitter", m.cov.jitter}};
  }
  j["inputs_hash"] = hex64(content_hash(set.inputs()));
  return j;
}

WrenchModelSet model_set_from_json(const nlohmann::json &j,
                                   const Eigen::MatrixXd &inputs,
                                   const Eigen::MatrixXd &wrench) {
  if (wrench.cols() != kWrenchDim || wrench.rows() != inputs.rows())
    throw Error(ErrorKind::Contract, "wrench must be N x 6 over the same N as inputs");
  try {
    if (j.at("inputs_hash").get<std::string>() != hex64(content_hash(inputs)))
      throw Error(ErrorKind::Contract, "model set was fitted on different inputs");
    auto shared = std::make_shared<const Eigen::MatrixXd>(inputs);
    WrenchModelSet set;
    for (std::size_t k = 0; k < set.models.size(); ++k) {
      const auto &c = j.at(kWrenchNames[k]);
      const KernelParams p{c.at("theta0").get<double>(), c.at("theta1").get<double>(),
                           c.at("sigma2").get<double>()};
      if (!(p.theta0 > 0.0 && p.theta1 > 0.0 && p.sigma2 > 0.0))
        throw Error(ErrorKind::Contract, "kernel parameters must be positive");
      set.models[k] = make_wrench_model(shared, wrench.col(static_cast<Eigen::Index>(k)), p);
    }
    return set;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::Ingest, std::string("bad model set: ") + e.what());
  }
}

} // namespace maps
