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

#ifndef MAPS_GP_MODEL_HPP
#define MAPS_GP_MODEL_HPP

#include <array>
#include <cstdint>
#include <memory>

#include <Eigen/Core>
#include <json.hpp>

#include "maps/trajectory.hpp"

namespace maps {

/// Squared-exponential kernel with a shared inverse squared lengthscale
/// over time, position and quaternion angle, plus white noise.
struct KernelParams {
  double theta0 = 1.0; // signal variance
  double theta1 = 1.0; // inverse squared lengthscale
  double sigma2 = 0.1; // noise variance

  bool operator==(const KernelParams &) const = default;
};

/// Squared geodesic angle between two rotations, in radians^2.
double quaternion_sq_angle(const Eigen::Quaterniond &qa,
                           const Eigen::Quaterniond &qb);

/// Same, on (w, x, y, z) 4-vectors as stored in input rows.
double quaternion_sq_angle(const Eigen::Ref<const Eigen::Vector4d> &qa,
                           const Eigen::Ref<const Eigen::Vector4d> &qb);

/// |dt|^2 + |dx|^2 + squared quaternion angle between two 8-D input rows.
double input_sq_distance(const Eigen::Ref<const Eigen::RowVectorXd> &dn,
                         const Eigen::Ref<const Eigen::RowVectorXd> &dm);

double kernel_entry(const Eigen::Ref<const Eigen::RowVectorXd> &dn,
                    const Eigen::Ref<const Eigen::RowVectorXd> &dm,
                    const KernelParams &p, bool same_index);

/// Pairwise input distances; independent of the kernel parameters, so a
/// fit computes them once and reuses them for every evaluation.
Eigen::MatrixXd input_sq_distances(const Eigen::MatrixXd &inputs);

struct Covariance {
  Eigen::MatrixXd matrix; // K + jitter * I
  Eigen::MatrixXd chol;   // lower triangular, chol * chol^T == matrix
  double log_det = 0.0;
  double jitter = 0.0;
};

inline constexpr double kJitterStart = 1e-10; // relative to theta0
inline constexpr double kJitterMax = 1e-4;

/// Builds the noisy kernel matrix and factors it. If the plain matrix is not
/// numerically positive definite a diagonal jitter starting at 1e-10*theta0
/// is added and grown tenfold up to 1e-4*theta0; beyond that Error(Numerical).
Covariance build_covariance(const Eigen::MatrixXd &inputs, const KernelParams &p);
Covariance covariance_from_distances(const Eigen::MatrixXd &sq_dist,
                                     const KernelParams &p);

/// GP evidence ln p(w | theta, D), evaluated through the Cholesky factor.
double log_marginal_likelihood(const Eigen::VectorXd &targets,
                               const Eigen::MatrixXd &inputs,
                               const KernelParams &p);
double log_marginal_likelihood(const Eigen::VectorXd &targets,
                               const Covariance &cov);

struct GpWrenchModel {
  KernelParams params;
  std::shared_ptr<const Eigen::MatrixXd> inputs;
  Eigen::VectorXd targets;
  Covariance cov;
  double lml = 0.0;

  const Eigen::MatrixXd &chol() const { return cov.chol; }
  double log_det() const { return cov.log_det; }
};

struct FitOptions {
  int max_iterations = 500;
  double tolerance = 1e-6; // simplex diameter in log-parameter space
  double initial_step = 1.0;
};

/// The fixed multi-start list in (ln theta0, ln theta1, ln sigma2).
std::array<Eigen::Vector3d, 4> fit_start_points(const Eigen::VectorXd &targets);

/// Box applied to log-parameters during the search.
inline constexpr double kLogParamMin[3] = {-27.6, -13.8, -27.6}; // 1e-12, 1e-6, 1e-12
inline constexpr double kLogParamMax[3] = {27.6, 18.4, 27.6};    // 1e12, 1e8, 1e12

GpWrenchModel fit_wrench_model(const Eigen::MatrixXd &inputs,
                               const Eigen::VectorXd &targets,
                               const FitOptions &options = {});
GpWrenchModel fit_wrench_model(std::shared_ptr<const Eigen::MatrixXd> inputs,
                               const Eigen::MatrixXd &sq_dist,
                               const Eigen::VectorXd &targets,
                               const FitOptions &options = {});

/// Rebuilds a model at given parameters without optimizing.
GpWrenchModel make_wrench_model(std::shared_ptr<const Eigen::MatrixXd> inputs,
                                const Eigen::VectorXd &targets,
                                const KernelParams &params);

inline constexpr std::array<const char *, 6> kWrenchNames = {"fx", "fy", "fz",
                                                             "tx", "ty", "tz"};

struct WrenchModelSet {
  std::array<GpWrenchModel, 6> models;

  const Eigen::MatrixXd &inputs() const { return *models[0].inputs; }
};

/// Six independent fits in (fx, fy, fz, tx, ty, tz) order.
WrenchModelSet fit_model_set(const Eigen::MatrixXd &inputs,
                             const Eigen::MatrixXd &wrench,
                             bool parallel = true);

/// FNV-1a over the raw bytes of the matrix (column-major) and its shape.
std::uint64_t content_hash(const Eigen::MatrixXd &m);

nlohmann::json model_set_to_json(const WrenchModelSet &set);

/// Recomputes the covariance factors at the stored parameters. Throws
/// Error(Contract) when the inputs do not match the stored hash.
WrenchModelSet model_set_from_json(const nlohmann::json &j,
                                   const Eigen::MatrixXd &inputs,
                                   const Eigen::MatrixXd &wrench);

} // namespace maps

#endif
