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

#include "maps/trajectory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "maps/error.hpp"

namespace maps {

namespace {

using nlohmann::json;

constexpr const char *kCsvHeader = "t,x,y,z,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz";
constexpr std::size_t kColumns = 14;

[[noreturn]] void ingest_error(const std::filesystem::path &path,
                               const std::string &msg) {
  throw Error(ErrorKind::Ingest, path.string() + ": " + msg);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

Eigen::Quaterniond make_quaternion(double w, double x, double y, double z,
                                   std::size_t row) {
  Eigen::Quaterniond q(w, x, y, z);
  const double norm = q.norm();
  if (!(norm > 1e-12) || !std::isfinite(norm))
    throw Error(ErrorKind::Ingest,
                "zero-norm quaternion at row " + std::to_string(row));
  q.coeffs() /= norm;
  return q;
}

Pose pose_from_json(const json &j) {
  const auto &p = j.at("position");
  const auto &o = j.at("orientation");
  if (p.size() != 3 || o.size() != 4)
    throw Error(ErrorKind::Ingest, "goal_pose needs position[3] and orientation[4]");
  Pose pose;
  pose.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  pose.orientation = make_quaternion(o[0].get<double>(), o[1].get<double>(),
                                     o[2].get<double>(), o[3].get<double>(), 0);
  return pose;
}

json pose_to_json(const Pose &pose) {
  const auto &q = pose.orientation;
  return {{"position", {pose.position.x(), pose.position.y(), pose.position.z()}},
          {"orientation", {q.w(), q.x(), q.y(), q.z()}}};
}

void push_row(Trajectory &traj, const std::array<double, kColumns> &v,
              std::size_t row) {
  traj.timestamps.push_back(v[0]);
  Pose pose;
  pose.position = {v[1], v[2], v[3]};
  pose.orientation = make_quaternion(v[4], v[5], v[6], v[7], row);
  traj.poses.push_back(pose);
  WrenchSample w;
  w.force = {v[8], v[9], v[10]};
  w.torque = {v[11], v[12], v[13]};
  traj.wrenches.push_back(w);
}

std::array<double, kColumns> row_values(const Trajectory &traj, std::size_t i) {
  const auto &p = traj.poses[i];
  const auto &w = traj.wrenches[i];
  return {traj.timestamps[i], p.position.x(), p.position.y(), p.position.z(),
          p.orientation.w(), p.orientation.x(), p.orientation.y(),
          p.orientation.z(), w.force.x(), w.force.y(), w.force.z(),
          w.torque.x(), w.torque.y(), w.torque.z()};
}

// Applies id/goal/label from a sidecar-shaped object. Missing goal falls
// back to the final pose.
void apply_metadata(Trajectory &traj, const json &meta,
                    const std::filesystem::path &path) {
  if (meta.contains("id") && meta["id"].is_string())
    traj.id = meta["id"].get<std::string>();
  if (meta.contains("label") && !meta["label"].is_null()) {
    auto label = parse_label(meta["label"].get<std::string>());
    if (!label)
      ingest_error(path, "unknown label '" + meta["label"].get<std::string>() + "'");
    traj.label = label;
  }
  if (meta.contains("goal_pose") && !meta["goal_pose"].is_null()) {
    traj.goal_pose = pose_from_json(meta["goal_pose"]);
  } else if (!traj.poses.empty()) {
    std::cerr << "warning: " << path.string()
              << ": no goal_pose, using the final pose\n";
    traj.goal_pose = traj.poses.back();
  }
}

Trajectory load_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    ingest_error(path, "empty file");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != kCsvHeader)
    ingest_error(path, "unexpected header '" + line + "'");

  Trajectory traj;
  traj.id = path.stem().string();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    ++row;
    std::array<double, kColumns> values{};
    const char *cur = line.data();
    const char *end = line.data() + line.size();
    for (std::size_t c = 0; c < kColumns; ++c) {
      while (cur < end && *cur == ' ')
        ++cur;
      auto [next, ec] = std::from_chars(cur, end, values[c]);
      if (ec != std::errc())
        ingest_error(path, "malformed row " + std::to_string(row));
      cur = next;
      while (cur < end && *cur == ' ')
        ++cur;
      if (c + 1 < kColumns) {
        if (cur == end || *cur != ',')
          ingest_error(path, "malformed row " + std::to_string(row) +
                                 ": expected 14 columns");
        ++cur;
      }
    }
    if (cur != end)
      ingest_error(path, "malformed row " + std::to_string(row) +
                             ": trailing data");
    try {
      push_row(traj, values, row);
    } catch (const Error &e) {
      ingest_error(path, e.what());
    }
  }

  json meta = json::object();
  auto sidecar = path;
  sidecar.replace_extension(".json");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream side(sidecar);
    try {
      meta = json::parse(side);
    } catch (const json::exception &e) {
      ingest_error(sidecar, std::string("bad sidecar: ") + e.what());
    }
  }
  try {
    apply_metadata(traj, meta, path);
  } catch (const json::exception &e) {
    ingest_error(sidecar, std::string("bad sidecar: ") + e.what());
  }
  try {
    validate(traj);
  } catch (const Error &e) {
    ingest_error(path, e.what());
  }
  return traj;
}

Trajectory load_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open " + path.string());
  Trajectory traj;
  traj.id = path.stem().string();
  try {
    const json doc = json::parse(in);
    const auto &samples = doc.at("samples");
    std::size_t row = 0;
    for (const auto &r : samples) {
      ++row;
      if (!r.is_array() || r.size() != kColumns)
        ingest_error(path, "malformed row " + std::to_string(row));
      std::array<double, kColumns> values{};
      for (std::size_t c = 0; c < kColumns; ++c) {
        if (!r[c].is_number())
          ingest_error(path, "malformed row " + std::to_string(row));
        values[c] = r[c].get<double>();
      }
      try {
        push_row(traj, values, row);
      } catch (const Error &e) {
        ingest_error(path, e.what());
      }
    }
    apply_metadata(traj, doc, path);
  } catch (const json::exception &e) {
    ingest_error(path, e.what());
  }
  try {
    validate(traj);
  } catch (const Error &e) {
    ingest_error(path, e.what());
  }
  return traj;
}

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  if (q.w() < 0.0)
    q.coeffs() = -q.coeffs();
  return q;
}

} // namespace

const char *label_name(Label label) {
  return label == Label::Success ? "success" : "failure";
}

std::optional<Label> parse_label(const std::string &text) {
  if (text == "success")
    return Label::Success;
  if (text == "failure")
    return Label::Failure;
  return std::nullopt;
}

void validate(const Trajectory &traj) {
  const std::size_t n = traj.timestamps.size();
  if (traj.poses.size() != n || traj.wrenches.size() != n)
    throw Error(ErrorKind::Ingest,
                "length mismatch: " + std::to_string(n) + " timestamps, " +
                    std::to_string(traj.poses.size()) + " poses, " +
                    std::to_string(traj.wrenches.size()) + " wrenches");
  if (n < 2)
    throw Error(ErrorKind::Ingest, "trajectory needs at least 2 samples");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = std::to_string(i + 1);
    if (!std::isfinite(traj.timestamps[i]))
      throw Error(ErrorKind::Ingest, "non-finite timestamp at row " + row);
    if (i > 0 && !(traj.timestamps[i] > traj.timestamps[i - 1]))
      throw Error(ErrorKind::Ingest, "non-monotone timestamps at row " + row);
    const auto &p = traj.poses[i];
    if (!p.position.allFinite())
      throw Error(ErrorKind::Ingest, "non-finite position at row " + row);
    if (std::abs(p.orientation.norm() - 1.0) > 1e-6)
      throw Error(ErrorKind::Ingest, "non-unit quaternion at row " + row);
    const auto &w = traj.wrenches[i];
    if (!w.force.allFinite() || !w.torque.allFinite())
      throw Error(ErrorKind::Ingest, "non-finite wrench at row " + row);
  }
}

Trajectory load_trajectory(const std::filesystem::path &path,
                           TrajectoryFormat format) {
  return format == TrajectoryFormat::Csv ? load_csv(path) : load_json(path);
}

Trajectory load_trajectory(const std::filesystem::path &path) {
  return load_trajectory(path, path.extension() == ".json"
                                   ? TrajectoryFormat::Json
                                   : TrajectoryFormat::Csv);
}

void save_trajectory(const Trajectory &traj, const std::filesystem::path &path,
                     TrajectoryFormat format) {
  json meta = {{"id", traj.id}, {"goal_pose", pose_to_json(traj.goal_pose)}};
  meta["label"] = traj.label ? json(label_name(*traj.label)) : json(nullptr);

  if (format == TrajectoryFormat::Json) {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.size(); ++i)
      rows.push_back(row_values(traj, i));
    meta["samples"] = std::move(rows);
    std::ofstream out(path);
    if (!out)
      throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << meta.dump(1) << '\n';
    return;
  }

  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto values = row_values(traj, i);
    for (std::size_t c = 0; c < kColumns; ++c) {
      if (c)
        out << ',';
      out << format_double(values[c]);
    }
    out << '\n';
  }
  auto sidecar = path;
  sidecar.replace_extension(".json");
  std::ofstream side(sidecar);
  if (!side)
    throw Error(ErrorKind::Io, "cannot write " + sidecar.string());
  side << meta.dump(1) << '\n';
}

Eigen::Quaterniond relative_orientation(const Eigen::Quaterniond &goal,
                                        const Eigen::Quaterniond &q) {
  Eigen::Quaterniond rel = goal.conjugate() * q;
  rel.normalize();
  return canonical(rel);
}

Trajectory relativize_to_goal(const Trajectory &traj) {
  Trajectory out = traj;
  for (auto &pose : out.poses) {
    pose.position -= traj.goal_pose.position;
    pose.orientation = relative_orientation(traj.goal_pose.orientation,
                                            pose.orientation);
  }
  out.goal_pose = Pose::identity();
  return out;
}

DtwResult dtw(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  if (n == 0 || m == 0)
    throw Error(ErrorKind::Alignment, "cannot align an empty trajectory");
  if (a.cols() != b.cols())
    throw Error(ErrorKind::Contract, "dtw: signal dimension mismatch");

  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(n + 1, m + 1, inf);
  acc(0, 0) = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i)
    for (Eigen::Index j = 1; j <= m; ++j) {
      const double cost = (a.row(i - 1) - b.row(j - 1)).norm();
      acc(i, j) = cost + std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});
    }

  DtwResult result;
  result.cost = acc(n, m);
  Eigen::Index i = n, j = m;
  while (i > 0 && j > 0) {
    result.path.emplace_back(static_cast<std::size_t>(i - 1),
                             static_cast<std::size_t>(j - 1));
    if (i == 1 && j == 1)
      break;
    const double diag = acc(i - 1, j - 1);
    const double up = acc(i - 1, j);
    const double left = acc(i, j - 1);
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (left <= up) {
      --j;
    } else {
      --i;
    }
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

Eigen::MatrixXd position_matrix(const Trajectory &traj) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(traj.size()), 3);
  for (std::size_t i = 0; i < traj.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = traj.poses[i].position.transpose();
  return out;
}

Eigen::MatrixXd wrench_matrix(const Trajectory &traj) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(traj.size()), kWrenchDim);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.block<1, 3>(r, 0) = traj.wrenches[i].force.transpose();
    out.block<1, 3>(r, 3) = traj.wrenches[i].torque.transpose();
  }
  return out;
}

Eigen::MatrixXd input_matrix(const Trajectory &traj) {
  const auto n = static_cast<Eigen::Index>(traj.size());
  Eigen::MatrixXd out(n, kInputDim);
  if (n == 0)
    return out;
  const double t0 = traj.timestamps.front();
  const double span = traj.timestamps.back() - t0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto &p = traj.poses[k];
    out(i, 0) = n > 1 ? (traj.timestamps[k] - t0) / span : 0.0;
    out.block<1, 3>(i, 1) = p.position.transpose();
    out(i, 4) = p.orientation.w();
    out(i, 5) = p.orientation.x();
    out(i, 6) = p.orientation.y();
    out(i, 7) = p.orientation.z();
  }
  if (n > 1)
    out(n - 1, 0) = 1.0;
  return out;
}

AlignedPair align_pair(const Trajectory &demo, const Trajectory &rep,
                       bool use_dtw) {
  if (demo.size() == 0 || rep.size() == 0)
    throw Error(ErrorKind::Alignment, "cannot align an empty trajectory");

  AlignedPair pair;
  pair.demo_inputs = input_matrix(demo);
  pair.demo_wrench = wrench_matrix(demo);
  const Eigen::Index n = pair.demo_inputs.rows();

  if (use_dtw) {
    pair.warp = dtw(position_matrix(demo), position_matrix(rep));
  } else {
    if (rep.size() != demo.size())
      throw Error(ErrorKind::Alignment,
                  "without DTW both trajectories need the same length (" +
                      std::to_string(demo.size()) + " vs " +
                      std::to_string(rep.size()) + ")");
    for (std::size_t i = 0; i < demo.size(); ++i)
      pair.warp.path.emplace_back(i, i);
    pair.warp.cost = (position_matrix(demo) - position_matrix(rep)).rowwise().norm().sum();
  }

  // Average every reproduction sample mapped onto the same demo index.
  const Eigen::MatrixXd rep_wrench = wrench_matrix(rep);
  Eigen::MatrixXd pos_sum = Eigen::MatrixXd::Zero(n, 3);
  Eigen::MatrixXd quat_sum = Eigen::MatrixXd::Zero(n, 4);
  pair.rep_wrench = Eigen::MatrixXd::Zero(n, kWrenchDim);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
  for (const auto &[di, ri] : pair.warp.path) {
    const auto d = static_cast<Eigen::Index>(di);
    const auto &pose = rep.poses[ri];
    pos_sum.row(d) += pose.position.transpose();
    Eigen::Vector4d q(pose.orientation.w(), pose.orientation.x(),
                      pose.orientation.y(), pose.orientation.z());
    if (counts(d) > 0 && quat_sum.row(d).dot(q.transpose()) < 0.0)
      q = -q;
    quat_sum.row(d) += q.transpose();
    pair.rep_wrench.row(d) += rep_wrench.row(static_cast<Eigen::Index>(ri));
    counts(d) += 1.0;
  }

  pair.rep_inputs.resize(n, kInputDim);
  for (Eigen::Index d = 0; d < n; ++d) {
    if (counts(d) == 1.0) {
      pair.rep_inputs.block<1, 3>(d, 1) = pos_sum.row(d);
    } else {
      pair.rep_inputs.block<1, 3>(d, 1) = pos_sum.row(d) / counts(d);
      pair.rep_wrench.row(d) /= counts(d);
    }
    Eigen::Vector4d q = quat_sum.row(d).transpose();
    if (counts(d) != 1.0)
      q.normalize();
    if (q(0) < 0.0)
      q = -q;
    pair.rep_inputs.block<1, 4>(d, 4) = q.transpose();
  }
  pair.rep_inputs.col(0) = pair.demo_inputs.col(0);
  return pair;
}

} // namespace maps
