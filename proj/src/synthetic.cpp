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

#include "maps/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "maps/error.hpp"

namespace maps {

namespace {

using C = GeneratorConstants;
using nlohmann::json;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kDemoSalt = 0xD3D0;
constexpr std::uint64_t kRepSalt = 0x5EED;

Eigen::Quaterniond yaw(double angle) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()));
}

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

struct RepParams {
  FailureMode mode = FailureMode::None;
  double amplitude = 1.0;
  Eigen::Vector3d start_offset = Eigen::Vector3d::Zero();
};

Eigen::Vector3d gaussian3(std::normal_distribution<double> &normal, std::mt19937_64 &rng) {
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k)
    v[k] = normal(rng);
  return v;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// All profiles are smooth in the contact phase v so that a squared
// exponential kernel can represent them; sharp edges are rounded over a
// few samples.
double snap_force(FailureMode mode, double v, double a) {
  auto press_release = [&](double scale) {
    const double onset = logistic((v - C::snap_onset_at) / C::snap_onset_width);
    const double d = (v - C::snap_peak_at) / C::snap_peak_width;
    return scale * a *
           (C::snap_residual * onset + (C::snap_peak - C::snap_residual) * std::exp(-0.5 * d * d));
  };
  switch (mode) {
  case FailureMode::None:
    return press_release(1.0);
  case FailureMode::Loose:
    return press_release(0.5);
  case FailureMode::Jam:
    return a * C::jam_level * logistic((v - C::jam_rise_at) / C::jam_rise_width);
  case FailureMode::Miss:
    return 0.0;
  }
  return 0.0;
}

// Fourier approximation of a unit sawtooth rising from 0 to 1 per cycle.
double soft_sawtooth(double x) {
  double s = 0.5;
  for (int k = 1; k <= 2; ++k)
    s -= std::sin(2.0 * std::numbers::pi * k * x) / (std::numbers::pi * k);
  return s;
}

double screw_torque(FailureMode mode, double v, double a, double phase) {
  const double onset = logistic((v - C::screw_onset_at) / C::screw_onset_width);
  const double cyc = C::screw_ratchet_cycles * v + phase;
  const double ramp = a * C::screw_ramp_end * v * onset;
  const double saw = a * C::screw_ratchet * soft_sawtooth(cyc) * onset;
  switch (mode) {
  case FailureMode::None: {
    const double level = C::screw_spike_ratio * a * C::screw_ramp_end;
    const double blend = logistic((v - C::screw_spike_at) / C::screw_spike_width);
    return (ramp + saw) + (level - ramp - saw) * blend;
  }
  case FailureMode::Loose:
    return ramp + saw;
  case FailureMode::Jam:
    return a * C::screw_jam_level * logistic((v - C::screw_jam_at) / C::screw_onset_width);
  case FailureMode::Miss:
    return a * C::screw_miss_level * std::sin(2.0 * std::numbers::pi * cyc) * onset;
  }
  return 0.0;
}

Trajectory build(const ScenarioSpec &spec, const DemoProfile &profile,
                 const RepParams &rp, std::mt19937_64 &rng, std::string id) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = spec.n_samples;
  const bool screw = spec.task == Task::Screwing;
  const double c = profile.contact_onset;
  const double depth = screw ? C::screw_depth : C::snap_depth;

  Trajectory traj;
  traj.id = std::move(id);
  traj.goal_pose = profile.goal;
  traj.label = rp.mode == FailureMode::None ? Label::Success : Label::Failure;
  traj.timestamps.resize(n);
  traj.poses.resize(n);
  traj.wrenches.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    traj.timestamps[i] = static_cast<double>(i) * C::dt;

    Eigen::Vector3d rel;
    double v = -1.0; // contact phase, negative during the approach
    if (s <= c) {
      const double fade = 1.0 - smoothstep(s / c);
      rel = Eigen::Vector3d(0.0, 0.0, depth) +
            (Eigen::Vector3d(0.0, 0.0, C::approach_height) + rp.start_offset) * fade;
    } else {
      v = (s - c) / (1.0 - c);
      const double travel = v;
      rel = Eigen::Vector3d(0.0, 0.0, depth * (1.0 - travel));
    }

    Pose &pose = traj.poses[i];
    const Eigen::Vector3d noise = gaussian3(normal, rng);
    pose.position = profile.goal.position + rel + C::position_noise * noise;
    if (screw) {
      const double angle = v < 0.0 ? C::screw_turn : C::screw_turn * (1.0 - v);
      pose.orientation = (profile.goal.orientation * yaw(angle)).normalized();
    } else {
      pose.orientation = profile.goal.orientation;
    }

    WrenchSample &w = traj.wrenches[i];
    const Eigen::Vector3d fn = gaussian3(normal, rng);
    const Eigen::Vector3d tn = gaussian3(normal, rng);
    w.force = C::force_noise * fn;
    w.torque = C::torque_noise * tn;
    if (screw) {
      // The axial push builds up gradually and may start just before contact.
      const double u = (s - c) / (1.0 - c);
      w.force.z() += rp.amplitude * C::screw_force *
                     logistic((u - C::screw_force_at) / C::screw_force_width);
    }
    if (v >= 0.0) {
      if (screw) {
        // Misalignment of the bit turns part of the drive torque into side load.
        const double drive = screw_torque(rp.mode, v, rp.amplitude, profile.ratchet_phase);
        w.torque.z() += drive;
        const Eigen::Vector2d side = C::screw_lateral_gain * drive * profile.coupling_dir;
        w.force.x() += side.x();
        w.force.y() += side.y();
        // The side load acts at the bit tip, below the sensor.
        w.torque.x() += C::screw_bit_length * side.y();
        w.torque.y() -= C::screw_bit_length * side.x();
      } else {
        // The snap is pressed off the sensor axis and its ramp pushes the part
        // sideways across the lever arm; the sensor reads r x F.
        const double push = snap_force(rp.mode, v, rp.amplitude);
        const Eigen::Vector3d arm(C::snap_lever * profile.coupling_dir.x(),
                                  C::snap_lever * profile.coupling_dir.y(), 0.0);
        const Eigen::Vector3d contact(-C::snap_tilt * push * profile.coupling_dir.y(),
                                      C::snap_tilt * push * profile.coupling_dir.x(), push);
        w.force += contact;
        w.torque += arm.cross(contact);
      }
    }
  }
  return traj;
}

RepParams draw_rep(const ScenarioSpec &spec, FailureMode mode, std::mt19937_64 &rng,
                   const DemoProfile &profile) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RepParams rp;
  rp.mode = mode;
  // Start offsets are horizontal; the descent height is common to all runs.
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  offset.x() = normal(rng);
  offset.y() = normal(rng);
  Eigen::Vector2d dir;
  dir.x() = normal(rng);
  dir.y() = normal(rng);
  const double amp = normal(rng);
  rp.start_offset = spec.start_jitter * offset;
  if (mode == FailureMode::None && spec.start_shift != 0.0) {
    dir /= std::max(dir.norm(), 1e-12);
    rp.start_offset.x() += spec.start_shift * dir.x();
    rp.start_offset.y() += spec.start_shift * dir.y();
  }
  rp.amplitude = profile.amplitude * C::rep_amplitude_bias * (1.0 + C::rep_amplitude_spread * amp);
  return rp;
}

std::string rep_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep_%03zu", i);
  return buf;
}

json pose_json(const Pose &p) {
  const auto &q = p.orientation;
  return {{"position", {p.position.x(), p.position.y(), p.position.z()}},
          {"orientation", {q.w(), q.x(), q.y(), q.z()}}};
}

SyntheticDataset generate(const ScenarioSpec &spec) {
  if (spec.n_samples < 10)
    throw Error(ErrorKind::Contract, "n_samples must be at least 10");
  if (!(spec.start_jitter >= 0.0))
    throw Error(ErrorKind::Contract, "start_jitter must be non-negative");

  const DemoProfile profile = demo_profile(spec);
  SyntheticDataset ds;
  {
    auto rng = stream(spec.seed, 0, kDemoSalt);
    RepParams demo;
    demo.amplitude = profile.amplitude;
    ds.demo = build(spec, profile, demo, rng, "demo");
    ds.demo.label.reset();
  }

  json reps = json::array();
  const std::size_t total = spec.n_success + spec.n_failure;
  for (std::size_t i = 0; i < total; ++i) {
    const FailureMode mode =
        i < spec.n_success ? FailureMode::None : failure_mode_for(spec, i - spec.n_success);
    auto rng = stream(spec.seed, i + 1, kRepSalt);
    const RepParams rp = draw_rep(spec, mode, rng, profile);
    ds.reps.push_back(build(spec, profile, rp, rng, rep_id(i)));
    reps.push_back({{"id", rep_id(i)},
                    {"failure_mode", failure_mode_name(mode)},
                    {"label", label_name(*ds.reps.back().label)},
                    {"amplitude", rp.amplitude},
                    {"start_offset", {rp.start_offset.x(), rp.start_offset.y(), rp.start_offset.z()}}});
  }

  const bool screw = spec.task == Task::Screwing;
  const double noise = screw ? C::torque_noise : C::force_noise;
  // Smallest gap between the success level and any failure level of the
  // discriminating channel (peak fz for snap-fit, final tz for screwing).
  const double margin =
      screw ? profile.amplitude * C::rep_amplitude_bias * C::screw_ramp_end *
                  (C::screw_spike_ratio - 1.0 - C::screw_ratchet / C::screw_ramp_end)
            : profile.amplitude * C::rep_amplitude_bias * C::snap_peak * 0.5;

  ds.manifest = {
      {"task", task_name(spec.task)},
      {"n_samples", spec.n_samples},
      {"seed", spec.seed},
      {"start_jitter", spec.start_jitter},
      {"start_shift", spec.start_shift},
      {"failure_mode", failure_mode_name(spec.failure_mode)},
      {"n_success", spec.n_success},
      {"n_failure", spec.n_failure},
      {"demo_profile",
       {{"contact_onset", profile.contact_onset},
        {"amplitude", profile.amplitude},
        {"ratchet_phase", profile.ratchet_phase},
        {"goal_pose", pose_json(profile.goal)}}},
      {"constants",
       {{"dt", C::dt},
        {"force_noise", C::force_noise},
        {"torque_noise", C::torque_noise},
        {"position_noise", C::position_noise},
        {"rep_amplitude_bias", C::rep_amplitude_bias},
        {"rep_amplitude_spread", C::rep_amplitude_spread},
        {"approach_height", C::approach_height},
        {"snap_depth", C::snap_depth},
        {"snap_peak", C::snap_peak},
        {"snap_residual", C::snap_residual},
        {"jam_level", C::jam_level},
        {"snap_onset_at", C::snap_onset_at},
        {"snap_onset_width", C::snap_onset_width},
        {"snap_peak_at", C::snap_peak_at},
        {"snap_peak_width", C::snap_peak_width},
        {"jam_rise_at", C::jam_rise_at},
        {"jam_rise_width", C::jam_rise_width},
        {"screw_onset_at", C::screw_onset_at},
        {"screw_onset_width", C::screw_onset_width},
        {"screw_spike_width", C::screw_spike_width},
        {"screw_force_at", C::screw_force_at},
        {"screw_force_width", C::screw_force_width},
        {"screw_jam_at", C::screw_jam_at},
        {"snap_lever", C::snap_lever},
        {"snap_tilt", C::snap_tilt},
        {"screw_lateral_gain", C::screw_lateral_gain},
        {"screw_bit_length", C::screw_bit_length},
        {"screw_depth", C::screw_depth},
        {"screw_force", C::screw_force},
        {"screw_ramp_end", C::screw_ramp_end},
        {"screw_ratchet", C::screw_ratchet},
        {"screw_ratchet_cycles", C::screw_ratchet_cycles},
        {"screw_spike_ratio", C::screw_spike_ratio},
        {"screw_spike_at", C::screw_spike_at},
        {"screw_jam_level", C::screw_jam_level},
        {"screw_miss_level", C::screw_miss_level},
        {"screw_turn", C::screw_turn}}},
      {"class_margin", margin},
      {"class_margin_noise_ratio", margin / noise},
      {"reps", reps}};
  return ds;
}

} // namespace

const char *task_name(Task t) { return t == Task::SnapFit ? "snapfit" : "screwing"; }

const char *failure_mode_name(FailureMode m) {
  switch (m) {
  case FailureMode::None:
    return "none";
  case FailureMode::Jam:
    return "jam";
  case FailureMode::Miss:
    return "miss";
  case FailureMode::Loose:
    return "loose";
  }
  return "none";
}

std::optional<Task> parse_task(const std::string &s) {
  if (s == "snapfit")
    return Task::SnapFit;
  if (s == "screwing")
    return Task::Screwing;
  return std::nullopt;
}

std::optional<FailureMode> parse_failure_mode(const std::string &s) {
  for (auto m : {FailureMode::None, FailureMode::Jam, FailureMode::Miss, FailureMode::Loose})
    if (s == failure_mode_name(m))
      return m;
  return std::nullopt;
}

ScenarioSpec default_scenario(Task task, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.task = task;
  spec.n_samples = task == Task::SnapFit ? 97 : 204;
  spec.seed = seed;
  return spec;
}

DemoProfile demo_profile(const ScenarioSpec &spec) {
  auto rng = stream(spec.seed, 0, spec.task == Task::SnapFit ? 1 : 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DemoProfile p;
  const double lo = spec.task == Task::SnapFit ? 0.55 : 0.30;
  p.contact_onset = lo + 0.1 * unit(rng);
  p.amplitude = 0.9 + 0.2 * unit(rng);
  p.ratchet_phase = unit(rng);
  p.goal.position = {0.45 + 0.1 * unit(rng), -0.1 + 0.2 * unit(rng), 0.1 + 0.05 * unit(rng)};
  const double yaw0 = std::numbers::pi * (2.0 * unit(rng) - 1.0);
  p.goal.orientation =
      (Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi, Eigen::Vector3d::UnitX())) *
       yaw(yaw0))
          .normalized();
  // Diagonal quadrant so that both horizontal axes see the coupling.
  const double quadrant = std::floor(4.0 * unit(rng));
  const double phi = std::numbers::pi * (0.25 + 0.5 * quadrant + (unit(rng) - 0.5) / 6.0);
  p.coupling_dir = {std::cos(phi), std::sin(phi)};
  return p;
}

FailureMode failure_mode_for(const ScenarioSpec &spec, std::size_t i) {
  if (spec.failure_mode != FailureMode::None)
    return spec.failure_mode;
  static constexpr FailureMode snap[] = {FailureMode::Jam, FailureMode::Miss, FailureMode::Loose};
  static constexpr FailureMode screw[] = {FailureMode::Miss, FailureMode::Loose, FailureMode::Jam};
  return spec.task == Task::SnapFit ? snap[i % 3] : screw[i % 3];
}

SyntheticDataset generate_snapfit(const ScenarioSpec &spec) {
  if (spec.task != Task::SnapFit)
    throw Error(ErrorKind::Contract, "generate_snapfit needs task = snapfit");
  return generate(spec);
}

SyntheticDataset generate_screwing(const ScenarioSpec &spec) {
  if (spec.task != Task::Screwing)
    throw Error(ErrorKind::Contract, "generate_screwing needs task = screwing");
  return generate(spec);
}

SyntheticDataset generate_dataset(const ScenarioSpec &spec) { return generate(spec); }

Trajectory generate_reproduction(const ScenarioSpec &spec, FailureMode mode,
                                 std::size_t index, const std::string &id) {
  const DemoProfile profile = demo_profile(spec);
  auto rng = stream(spec.seed, index + 1, kRepSalt);
  const RepParams rp = draw_rep(spec, mode, rng, profile);
  return build(spec, profile, rp, rng, id);
}

void write_dataset(const SyntheticDataset &ds, const std::filesystem::path &dir,
                   bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir))
      throw Error(ErrorKind::Io, dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force)
        throw Error(ErrorKind::Io, dir.string() + " is not empty (use --force)");
      fs::remove_all(dir / "demo");
      fs::remove_all(dir / "reps");
      fs::remove(dir / "manifest.json");
    }
  }
  fs::create_directories(dir / "demo");
  fs::create_directories(dir / "reps");
  save_trajectory(ds.demo, dir / "demo" / (ds.demo.id + ".csv"), TrajectoryFormat::Csv);
  for (const auto &rep : ds.reps)
    save_trajectory(rep, dir / "reps" / (rep.id + ".csv"), TrajectoryFormat::Csv);
  std::ofstream out(dir / "manifest.json");
  if (!out)
    throw Error(ErrorKind::Io, "cannot write " + (dir / "manifest.json").string());
  out << ds.manifest.dump(2) << '\n';
}

} // namespace maps
