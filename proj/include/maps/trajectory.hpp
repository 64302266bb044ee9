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

#ifndef MAPS_TRAJECTORY_HPP
#define MAPS_TRAJECTORY_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace maps {

inline constexpr Eigen::Index kInputDim = 8;  // t, x, y, z, qw, qx, qy, qz
inline constexpr Eigen::Index kWrenchDim = 6; // fx, fy, fz, tx, ty, tz

enum class Label { Success, Failure };

const char *label_name(Label label);
std::optional<Label> parse_label(const std::string &text);

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  static Pose identity() { return {}; }
};

struct WrenchSample {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
};

struct Trajectory {
  std::string id;
  std::vector<double> timestamps;
  std::vector<Pose> poses;
  std::vector<WrenchSample> wrenches;
  Pose goal_pose;
  std::optional<Label> label;

  std::size_t size() const { return timestamps.size(); }
};

// Throws Error(Ingest) naming the first offending row (1-based) when the
// trajectory breaks its invariants: N >= 2, equal lengths, strictly
// increasing finite time, finite wrench, unit quaternions.
void validate(const Trajectory &traj);

enum class TrajectoryFormat { Csv, Json };

// CSV: header t,x,y,z,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz plus an optional
// sidecar <stem>.json carrying id, goal_pose and label. JSON: the sidecar
// object with an added "samples" array of 14-element rows.
Trajectory load_trajectory(const std::filesystem::path &path,
                           TrajectoryFormat format);
Trajectory load_trajectory(const std::filesystem::path &path);

void save_trajectory(const Trajectory &traj, const std::filesystem::path &path,
                     TrajectoryFormat format);

/// Express every pose relative to the goal pose. The result's goal is the
/// identity pose and its quaternions have w >= 0.
Trajectory relativize_to_goal(const Trajectory &traj);

/// Relative quaternion conj(goal) * q with the double cover resolved to w >= 0.
Eigen::Quaterniond relative_orientation(const Eigen::Quaterniond &goal,
                                        const Eigen::Quaterniond &q);

struct DtwResult {
  std::vector<std::pair<std::size_t, std::size_t>> path; // (a index, b index)
  double cost = 0.0;
};

/// Classic full-window DTW with Euclidean local cost on row vectors.
/// Ties prefer the diagonal step, then the step advancing `b`.
DtwResult dtw(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);

struct AlignedPair {
  Eigen::MatrixXd demo_inputs; // N x 8
  Eigen::MatrixXd demo_wrench; // N x 6
  Eigen::MatrixXd rep_inputs;  // N x 8
  Eigen::MatrixXd rep_wrench;  // N x 6
  DtwResult warp;
};

Eigen::MatrixXd position_matrix(const Trajectory &traj);
Eigen::MatrixXd wrench_matrix(const Trajectory &traj);

/// N x 8 input matrix with the timestamps rescaled to [0, 1].
Eigen::MatrixXd input_matrix(const Trajectory &traj);

/// Resample the (relativized) reproduction onto the demonstration's grid.
/// With `use_dtw` false the two trajectories must already share N and are
/// paired index by index.
AlignedPair align_pair(const Trajectory &demo, const Trajectory &rep,
                       bool use_dtw = true);

} // namespace maps

#endif
