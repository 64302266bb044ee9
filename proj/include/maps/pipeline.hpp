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

#ifndef MAPS_PIPELINE_HPP
#define MAPS_PIPELINE_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maps/classifier.hpp"
#include "maps/gp_model.hpp"
#include "maps/similarity.hpp"
#include "maps/trajectory.hpp"

namespace maps {

struct PipelineConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path model_out;
  double variance_floor = kDefaultSigmaFloor;
  bool dtw_enabled = true;
  bool parallel_fits = true;
  std::optional<std::uint64_t> seed;
};

/// Wall-clock seconds accumulated per named stage, in first-use order.
class StageTimes {
public:
  void add(const std::string &stage, double seconds);
  const std::vector<std::pair<std::string, double>> &entries() const { return entries_; }
  double get(const std::string &stage) const;

private:
  std::vector<std::pair<std::string, double>> entries_;
};

class ScopedStage {
public:
  ScopedStage(StageTimes &times, std::string stage)
      : times_(times), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~ScopedStage() {
    times_.add(stage_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }
  ScopedStage(const ScopedStage &) = delete;
  ScopedStage &operator=(const ScopedStage &) = delete;

private:
  StageTimes &times_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

struct Dataset {
  std::filesystem::path root;
  Trajectory demo;
  std::vector<Trajectory> reps; // sorted by file name
};

/// Loads <dir>/demo/<id>.csv and every <dir>/reps/<id>.csv. Throws
/// Error(MissingDemo) when demo/ holds no trajectory.
Dataset load_dataset(const std::filesystem::path &dir);
Trajectory load_demo(const std::filesystem::path &dir);

/// Relativized demonstration with its fitted wrench models.
struct PreparedDemo {
  Trajectory relative;
  WrenchModelSet models;
};

PreparedDemo prepare_demo(const Trajectory &demo, const PipelineConfig &config,
                          StageTimes &times);

/// Relativize, align, fit and compare one reproduction against the demo.
FeatureRow reproduction_features(const PreparedDemo &demo, const Trajectory &rep,
                                 const PipelineConfig &config, StageTimes &times);

std::vector<FeatureRow> dataset_features(const Dataset &ds, const PipelineConfig &config,
                                         StageTimes &times,
                                         const PreparedDemo *prepared = nullptr);

struct TrainOutcome {
  NaiveBayesModel model;
  std::vector<FeatureRow> rows;
  WrenchModelSet demo_models;
  StageTimes times;
};

/// Training branch: features for every labeled reproduction, then the
/// classifier. Unlabeled reproductions are skipped with a warning.
TrainOutcome train_pipeline(const PipelineConfig &config);

std::filesystem::path features_path(const std::filesystem::path &model_out);
std::filesystem::path demo_models_path(const std::filesystem::path &model_out);

/// Writes the classifier to config.model_out plus the features CSV and the
/// demonstration's model set next to it.
void write_training_outputs(const TrainOutcome &outcome, const PipelineConfig &config);

struct AssessOutcome {
  Assessment assessment;
  StageTimes times;
};

/// Apply branch against the demo of config.dataset_dir and the classifier
/// at config.model_out.
AssessOutcome assess_trajectory(const PipelineConfig &config,
                                const std::filesystem::path &trajectory_path);

enum class EvalMode { Loocv, CrossDemo };

struct ReportEntry {
  std::string dataset;
  Assessment assessment;
  Label actual;
};

struct FoldSummary {
  std::string dataset;
  std::uint64_t n = 0;
  double accuracy = 0.0;
};

struct EvaluationReport {
  EvalMode mode = EvalMode::Loocv;
  std::vector<ReportEntry> per_trajectory;
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  std::vector<FoldSummary> folds;
  std::size_t skipped = 0;
  StageTimes timing;
};

/// loocv: leave-one-out within each dataset. cross_demo: each dataset in
/// turn is assessed by a classifier trained on all the others (needs >= 2).
EvaluationReport evaluate(const std::vector<std::filesystem::path> &datasets,
                          EvalMode mode, const PipelineConfig &config);

/// Same, on already extracted labeled features, one list per dataset.
EvaluationReport evaluate_features(const std::vector<std::string> &names,
                                   const std::vector<std::vector<FeatureRow>> &rows,
                                   EvalMode mode, double variance_floor);

enum class ReportFormat { Text, Csv, Json };

/// Timing is only rendered when requested; it is the one non-deterministic
/// part of a report.
std::string render_report(const EvaluationReport &report, ReportFormat format,
                          bool include_timing = false);
std::string render_confusion_csv(const ConfusionMatrix &cm);
void write_report_files(const EvaluationReport &report, const std::filesystem::path &dir);

} // namespace maps

#endif
