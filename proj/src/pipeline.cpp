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

#include "maps/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "maps/error.hpp"

namespace maps {

namespace fs = std::filesystem;
using nlohmann::json;

void StageTimes::add(const std::string &stage, double seconds) {
  for (auto &[name, total] : entries_)
    if (name == stage) {
      total += seconds;
      return;
    }
  entries_.emplace_back(stage, seconds);
}

double StageTimes::get(const std::string &stage) const {
  for (const auto &[name, total] : entries_)
    if (name == stage)
      return total;
  return 0.0;
}

namespace {

std::vector<fs::path> csv_files(const fs::path &dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir))
    return out;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

json read_json(const fs::path &p) {
  std::ifstream in(p);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::Ingest, p.string() + ": " + e.what());
  }
}

void write_text(const fs::path &p, const std::string &text) {
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write " + p.string());
  out << text;
}

} // namespace

Trajectory load_demo(const fs::path &dir) {
  const auto demos = csv_files(dir / "demo");
  if (demos.empty())
    throw Error(ErrorKind::MissingDemo, "no demonstration found in " + (dir / "demo").string());
  if (demos.size() > 1)
    std::cerr << "warning: " << (dir / "demo").string() << " holds " << demos.size()
              << " trajectories, using " << demos.front().filename().string() << '\n';
  return load_trajectory(demos.front(), TrajectoryFormat::Csv);
}

Dataset load_dataset(const fs::path &dir) {
  if (!fs::is_directory(dir))
    throw Error(ErrorKind::Io, "dataset directory not found: " + dir.string());
  Dataset ds;
  ds.root = dir;
  ds.demo = load_demo(dir);
  for (const auto &p : csv_files(dir / "reps"))
    ds.reps.push_back(load_trajectory(p, TrajectoryFormat::Csv));
  return ds;
}

PreparedDemo prepare_demo(const Trajectory &demo, const PipelineConfig &config,
                          StageTimes &times) {
  PreparedDemo out;
  {
    ScopedStage s(times, "relativize_align");
    out.relative = relativize_to_goal(demo);
  }
  ScopedStage s(times, "gp_fit");
  out.models = fit_model_set(input_matrix(out.relative), wrench_matrix(out.relative),
                             config.parallel_fits);
  return out;
}

FeatureRow reproduction_features(const PreparedDemo &demo, const Trajectory &rep,
                                 const PipelineConfig &config, StageTimes &times) {
  AlignedPair pair;
  {
    ScopedStage s(times, "relativize_align");
    pair = align_pair(demo.relative, relativize_to_goal(rep), config.dtw_enabled);
  }
  WrenchModelSet rep_set;
  {
    ScopedStage s(times, "gp_fit");
    rep_set = fit_model_set(pair.rep_inputs, pair.rep_wrench, config.parallel_fits);
  }
  ScopedStage s(times, "features");
  return {rep.id, extract_features(demo.models, rep_set), rep.label};
}

std::vector<FeatureRow> dataset_features(const Dataset &ds, const PipelineConfig &config,
                                         StageTimes &times, const PreparedDemo *prepared) {
  PreparedDemo local;
  if (!prepared) {
    local = prepare_demo(ds.demo, config, times);
    prepared = &local;
  }
  std::vector<FeatureRow> rows;
  rows.reserve(ds.reps.size());
  for (const auto &rep : ds.reps)
    rows.push_back(reproduction_features(*prepared, rep, config, times));
  return rows;
}

namespace {

// Labeled reproductions only, and both classes present.
std::vector<Trajectory> labeled_reps(const Dataset &ds) {
  std::vector<Trajectory> out;
  for (const auto &r : ds.reps) {
    if (r.label)
      out.push_back(r);
    else
      std::cerr << "warning: " << r.id << " has no label, skipped\n";
  }
  return out;
}

} // namespace

TrainOutcome train_pipeline(const PipelineConfig &config) {
  TrainOutcome out;
  Dataset ds;
  {
    ScopedStage s(out.times, "load");
    ds = load_dataset(config.dataset_dir);
  }
  ds.reps = labeled_reps(ds);
  const auto n_success = std::count_if(ds.reps.begin(), ds.reps.end(),
                                       [](const Trajectory &t) { return *t.label == Label::Success; });
  if (n_success == 0 || n_success == static_cast<long>(ds.reps.size()))
    throw Error(ErrorKind::Training,
                "training needs labeled reproductions of both classes (found " +
                    std::to_string(n_success) + " success, " +
                    std::to_string(ds.reps.size() - static_cast<std::size_t>(n_success)) +
                    " failure)");

  const PreparedDemo demo = prepare_demo(ds.demo, config, out.times);
  out.rows = dataset_features(ds, config, out.times, &demo);
  out.demo_models = demo.models;

  std::vector<FeatureVector> f;
  std::vector<Label> l;
  for (const auto &r : out.rows) {
    f.push_back(r.features);
    l.push_back(*r.label);
  }
  ScopedStage s(out.times, "classify");
  out.model = train_classifier(f, l, config.variance_floor);
  return out;
}

fs::path features_path(const fs::path &model_out) {
  auto p = model_out;
  return p.replace_extension(".features.csv");
}

fs::path demo_models_path(const fs::path &model_out) {
  auto p = model_out;
  return p.replace_extension(".demo_gp.json");
}

void write_training_outputs(const TrainOutcome &outcome, const PipelineConfig &config) {
  write_text(config.model_out, classifier_to_json(outcome.model).dump(2) + "\n");
  std::ostringstream csv;
  write_features_csv(csv, outcome.rows);
  write_text(features_path(config.model_out), csv.str());
  write_text(demo_models_path(config.model_out),
             model_set_to_json(outcome.demo_models).dump(2) + "\n");
}

AssessOutcome assess_trajectory(const PipelineConfig &config,
                                const fs::path &trajectory_path) {
  AssessOutcome out;
  Trajectory demo, traj;
  NaiveBayesModel model;
  {
    ScopedStage s(out.times, "load");
    demo = load_demo(config.dataset_dir);
    traj = load_trajectory(trajectory_path);
    model = classifier_from_json(read_json(config.model_out));
  }

  PreparedDemo prepared;
  const fs::path cached = demo_models_path(config.model_out);
  bool have_models = false;
  if (fs::exists(cached)) {
    ScopedStage s(out.times, "gp_fit");
    prepared.relative = relativize_to_goal(demo);
    try {
      prepared.models = model_set_from_json(read_json(cached), input_matrix(prepared.relative),
                                            wrench_matrix(prepared.relative));
      have_models = true;
    } catch (const Error &e) {
      std::cerr << "warning: ignoring " << cached.string() << ": " << e.what() << '\n';
    }
  }
  if (!have_models)
    prepared = prepare_demo(demo, config, out.times);

  const FeatureRow row = reproduction_features(prepared, traj, config, out.times);
  ScopedStage s(out.times, "classify");
  out.assessment = classify(model, row.features, row.trajectory_id);
  return out;
}

EvaluationReport evaluate_features(const std::vector<std::string> &names,
                                   const std::vector<std::vector<FeatureRow>> &rows,
                                   EvalMode mode, double variance_floor) {
  if (names.size() != rows.size())
    throw Error(ErrorKind::Contract, "dataset names and feature lists differ in length");
  EvaluationReport report;
  report.mode = mode;

  auto labeled = [](const std::vector<FeatureRow> &in) {
    std::vector<FeatureRow> out;
    for (const auto &r : in)
      if (r.label)
        out.push_back(r);
    return out;
  };

  if (mode == EvalMode::Loocv) {
    for (std::size_t d = 0; d < rows.size(); ++d) {
      const auto set = labeled(rows[d]);
      std::vector<FeatureVector> f;
      std::vector<Label> l;
      std::vector<std::string> ids;
      for (const auto &r : set) {
        f.push_back(r.features);
        l.push_back(*r.label);
        ids.push_back(r.trajectory_id);
      }
      const auto res = evaluate_loocv(f, l, ids, variance_floor);
      for (const auto &p : res.predictions) {
        report.per_trajectory.push_back({names[d], p.assessment, p.actual});
        report.confusion.add(p.actual, p.assessment.predicted);
      }
      report.folds.push_back({names[d], res.confusion.total(), res.accuracy});
      report.skipped += res.skipped;
    }
  } else {
    if (rows.size() < 2)
      throw Error(ErrorKind::Contract, "cross-demo evaluation needs at least two datasets");
    for (std::size_t test = 0; test < rows.size(); ++test) {
      std::vector<FeatureVector> f;
      std::vector<Label> l;
      for (std::size_t d = 0; d < rows.size(); ++d) {
        if (d == test)
          continue;
        for (const auto &r : labeled(rows[d])) {
          f.push_back(r.features);
          l.push_back(*r.label);
        }
      }
      const auto model = train_classifier(f, l, variance_floor);
      ConfusionMatrix cm;
      for (const auto &r : labeled(rows[test])) {
        auto a = classify(model, r.features, r.trajectory_id);
        cm.add(*r.label, a.predicted);
        report.confusion.add(*r.label, a.predicted);
        report.per_trajectory.push_back({names[test], std::move(a), *r.label});
      }
      report.folds.push_back({names[test], cm.total(), cm.accuracy()});
    }
  }
  report.accuracy = report.confusion.accuracy();
  return report;
}

EvaluationReport evaluate(const std::vector<fs::path> &datasets, EvalMode mode,
                          const PipelineConfig &config) {
  if (datasets.empty())
    throw Error(ErrorKind::Contract, "evaluation needs at least one dataset");
  if (mode == EvalMode::CrossDemo && datasets.size() < 2)
    throw Error(ErrorKind::Contract, "cross-demo evaluation needs at least two datasets");

  StageTimes times;
  std::vector<std::string> names;
  std::vector<std::vector<FeatureRow>> rows;
  for (const auto &dir : datasets) {
    Dataset ds;
    {
      ScopedStage s(times, "load");
      ds = load_dataset(dir);
    }
    ds.reps = labeled_reps(ds);
    names.push_back(dir.filename().empty() ? dir.parent_path().filename().string()
                                           : dir.filename().string());
    rows.push_back(dataset_features(ds, config, times));
  }
  EvaluationReport report;
  {
    ScopedStage s(times, "classify");
    report = evaluate_features(names, rows, mode, config.variance_floor);
  }
  report.timing = times;
  return report;
}

std::string render_confusion_csv(const ConfusionMatrix &cm) {
  std::ostringstream out;
  out << "actual,predicted_success,predicted_failure\n";
  out << "success," << cm.counts[0][0] << ',' << cm.counts[0][1] << '\n';
  out << "failure," << cm.counts[1][0] << ',' << cm.counts[1][1] << '\n';
  return out.str();
}

namespace {

const char *mode_name(EvalMode m) { return m == EvalMode::Loocv ? "loocv" : "cross-demo"; }

std::string render_text(const EvaluationReport &r, bool include_timing) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "mode: %s   n = %llu   accuracy = %.4f   skipped folds = %zu\n\n",
                mode_name(r.mode), static_cast<unsigned long long>(r.confusion.total()),
                r.accuracy, r.skipped);
  out << line;
  std::snprintf(line, sizeof line, "%-16s %18s %18s\n", "", "Predicted: Success",
                "Predicted: Failure");
  out << line;
  std::snprintf(line, sizeof line, "%-16s %18llu %18llu\n", "Actual: Success",
                static_cast<unsigned long long>(r.confusion.counts[0][0]),
                static_cast<unsigned long long>(r.confusion.counts[0][1]));
  out << line;
  std::snprintf(line, sizeof line, "%-16s %18llu %18llu\n\n", "Actual: Failure",
                static_cast<unsigned long long>(r.confusion.counts[1][0]),
                static_cast<unsigned long long>(r.confusion.counts[1][1]));
  out << line;

  std::snprintf(line, sizeof line, "%-24s %6s %9s\n", "dataset", "n", "accuracy");
  out << line;
  for (const auto &f : r.folds) {
    std::snprintf(line, sizeof line, "%-24s %6llu %9.4f\n", f.dataset.c_str(),
                  static_cast<unsigned long long>(f.n), f.accuracy);
    out << line;
  }
  out << '\n';

  std::snprintf(line, sizeof line, "%-24s %-12s %-8s %-9s %10s  %s\n", "dataset", "trajectory",
                "actual", "predicted", "p_success", "features (m1..m6)");
  out << line;
  for (const auto &e : r.per_trajectory) {
    const auto &a = e.assessment;
    std::snprintf(line, sizeof line, "%-24s %-12s %-8s %-9s %10.6f ", e.dataset.c_str(),
                  a.trajectory_id.c_str(), label_name(e.actual), label_name(a.predicted),
                  a.p_success);
    out << line;
    for (double m : a.features.m) {
      std::snprintf(line, sizeof line, " %.4f", m);
      out << line;
    }
    if (a.features.degenerate)
      out << "  [degenerate]";
    out << '\n';
  }
  if (include_timing) {
    out << "\ntiming (s):\n";
    for (const auto &[stage, s] : r.timing.entries()) {
      std::snprintf(line, sizeof line, "  %-18s %10.3f\n", stage.c_str(), s);
      out << line;
    }
  }
  return out.str();
}

std::string render_assessments_csv(const EvaluationReport &r) {
  std::ostringstream out;
  out << "dataset,trajectory_id,actual,predicted,p_success,m1,m2,m3,m4,m5,m6,degenerate\n";
  for (const auto &e : r.per_trajectory) {
    const auto &a = e.assessment;
    out << e.dataset << ',' << a.trajectory_id << ',' << label_name(e.actual) << ','
        << label_name(a.predicted) << ',' << fmt_double(a.p_success);
    for (double m : a.features.m)
      out << ',' << fmt_double(m);
    out << ',' << (a.features.degenerate ? 1 : 0) << '\n';
  }
  return out.str();
}

json report_json(const EvaluationReport &r, bool include_timing) {
  json j;
  j["mode"] = mode_name(r.mode);
  j["n"] = r.confusion.total();
  j["accuracy"] = r.accuracy;
  j["skipped_folds"] = r.skipped;
  j["confusion"] = {{"labels", {"success", "failure"}},
                    {"rows", "actual"},
                    {"columns", "predicted"},
                    {"counts", {{r.confusion.counts[0][0], r.confusion.counts[0][1]},
                                {r.confusion.counts[1][0], r.confusion.counts[1][1]}}}};
  json folds = json::array();
  for (const auto &f : r.folds)
    folds.push_back({{"dataset", f.dataset}, {"n", f.n}, {"accuracy", f.accuracy}});
  j["datasets"] = folds;
  json per = json::array();
  for (const auto &e : r.per_trajectory) {
    const auto &a = e.assessment;
    per.push_back({{"dataset", e.dataset},
                   {"trajectory_id", a.trajectory_id},
                   {"actual", label_name(e.actual)},
                   {"predicted", label_name(a.predicted)},
                   {"p_success", a.p_success},
                   {"features", a.features.m},
                   {"raw_h", a.features.raw_h},
                   {"degenerate", a.features.degenerate}});
  }
  j["per_trajectory"] = per;
  if (include_timing) {
    json t = json::object();
    for (const auto &[stage, s] : r.timing.entries())
      t[stage] = s;
    j["timing"] = t;
  }
  return j;
}

} // namespace

std::string render_report(const EvaluationReport &report, ReportFormat format,
                          bool include_timing) {
  switch (format) {
  case ReportFormat::Text:
    return render_text(report, include_timing);
  case ReportFormat::Csv:
    return render_confusion_csv(report.confusion) + "\n" + render_assessments_csv(report);
  case ReportFormat::Json:
    return report_json(report, include_timing).dump(2) + "\n";
  }
  return {};
}

void write_report_files(const EvaluationReport &report, const fs::path &dir) {
  fs::create_directories(dir);
  write_text(dir / "report.txt", render_text(report, false));
  write_text(dir / "report.json", report_json(report, false).dump(2) + "\n");
  write_text(dir / "assessments.csv", render_assessments_csv(report));
  write_text(dir / "confusion.csv", render_confusion_csv(report.confusion));
}

} // namespace maps
