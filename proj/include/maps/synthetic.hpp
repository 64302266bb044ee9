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

#ifndef MAPS_SYNTHETIC_HPP
#define MAPS_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maps/trajectory.hpp"

namespace maps {

enum class Task { SnapFit, Screwing };
enum class FailureMode { None, Jam, Miss, Loose };

const char *task_name(Task t);
const char *failure_mode_name(FailureMode m);
std::optional<Task> parse_task(const std::string &s);
std::optional<FailureMode> parse_failure_mode(const std::string &s);

struct ScenarioSpec {
  Task task = Task::SnapFit;
  std::size_t n_samples = 97; // 204 for screwing
  std::uint64_t seed = 0;
  double start_jitter = 0.03; // m, std of the random start offset
  // Mode of every failure reproduction; None cycles through the task's
  // failure modes.
  FailureMode failure_mode = FailureMode::None;
  std::size_t n_success = 10;
  std::size_t n_failure = 10;
  double start_shift = 0.0; // m, extra start offset applied to success reps
};

ScenarioSpec default_scenario(Task task, std::uint64_t seed = 0);

/// Per-dataset "demonstrator" variation derived from the seed.
struct DemoProfile {
  double contact_onset = 0.6; // phase at which contact begins
  double amplitude = 1.0;     // wrench scale of this demonstration
  double ratchet_phase = 0.0; // screwing sawtooth phase
  Pose goal;
  Eigen::Vector2d coupling_dir = Eigen::Vector2d::UnitX(); // horizontal, unit length
};

DemoProfile demo_profile(const ScenarioSpec &spec);

struct SyntheticDataset {
  Trajectory demo;
  std::vector<Trajectory> reps;
  nlohmann::json manifest;
};

SyntheticDataset generate_snapfit(const ScenarioSpec &spec);
SyntheticDataset generate_screwing(const ScenarioSpec &spec);
SyntheticDataset generate_dataset(const ScenarioSpec &spec);

/// One reproduction of the dataset's demonstration. `index` selects the
/// random stream, so equal (spec, index) pairs give equal trajectories.
Trajectory generate_reproduction(const ScenarioSpec &spec, FailureMode mode,
                                 std::size_t index, const std::string &id);

/// Failure mode of the i-th failure reproduction.
FailureMode failure_mode_for(const ScenarioSpec &spec, std::size_t i);

/// Writes demo/, reps/ and manifest.json. A non-empty target is refused
/// unless `force`, in which case those three entries are replaced.
void write_dataset(const SyntheticDataset &ds, const std::filesystem::path &dir,
                   bool force);

// Generator constants, recorded in the manifest.
struct GeneratorConstants {
  static constexpr double dt = 0.05;               // s
  static constexpr double force_noise = 0.05;      // N
  static constexpr double torque_noise = 0.005;    // N m
  static constexpr double position_noise = 1e-5;   // m
  static constexpr double rep_amplitude_bias = 0.9;
  static constexpr double rep_amplitude_spread = 0.03;
  static constexpr double approach_height = 0.15;  // m
  // snap-fit
  static constexpr double snap_depth = 0.008;      // m
  static constexpr double snap_peak = 20.0;        // N
  static constexpr double snap_residual = 5.0;     // N
  static constexpr double jam_level = 30.0;        // N
  static constexpr double snap_onset_at = 0.2;     // contact-phase positions below
  static constexpr double snap_onset_width = 0.04;
  static constexpr double snap_peak_at = 0.55;
  static constexpr double snap_peak_width = 0.1;
  static constexpr double jam_rise_at = 0.5;
  static constexpr double jam_rise_width = 0.07;
  // screwing
  static constexpr double snap_lever = 0.02;        // m, contact point off the sensor axis
  static constexpr double snap_tilt = 0.5;          // lateral over axial contact force
  static constexpr double screw_lateral_gain = 2.0; // N per N m of drive torque
  static constexpr double screw_bit_length = 0.1;   // m, sensor to bit tip
  static constexpr double screw_depth = 0.004;     // m
  static constexpr double screw_force = 5.0;       // N
  static constexpr double screw_ramp_end = 0.4;    // N m
  static constexpr double screw_ratchet = 0.08;    // N m
  static constexpr double screw_ratchet_cycles = 6.0;
  static constexpr double screw_spike_ratio = 1.5;
  static constexpr double screw_onset_at = 0.1;
  static constexpr double screw_onset_width = 0.04;
  static constexpr double screw_force_at = 0.12;
  static constexpr double screw_force_width = 0.05;
  static constexpr double screw_spike_at = 0.8;
  static constexpr double screw_spike_width = 0.03;
  static constexpr double screw_jam_at = 0.15;
  static constexpr double screw_jam_level = 0.8;   // N m
  static constexpr double screw_miss_level = 0.02; // N m
  static constexpr double screw_turn = 1.5707963267948966; // rad, yaw over the screwing phase
};

} // namespace maps

#endif
