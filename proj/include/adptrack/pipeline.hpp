// Copyright 2026 the adptrack authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "adptrack/config.hpp"
#include "adptrack/gain_io.hpp"
#include "adptrack/lspi.hpp"
#include "adptrack/plant.hpp"
#include "adptrack/qfunc.hpp"
#include "adptrack/reference.hpp"

// Experiment runner: collect -> smooth -> fit reference parameters ->
// propagate -> assemble tuples -> normalize -> policy iteration ->
// re-normalize, plus closed-loop validation and the model-based comparison.
// All artifacts are plain CSV/JSON files, reproducible byte-for-byte from
// (config, seed).

namespace adptrack {

PlantParams plant_params(const ExperimentConfig& cfg);
ExcitationConfig excitation_config(const ExperimentConfig& cfg);
TrainConfig train_config(const ExperimentConfig& cfg);
BasisSpec basis_spec(const ExperimentConfig& cfg);
FitConfig fit_config(const ExperimentConfig& cfg);
FeatureLayout feature_layout(const ExperimentConfig& cfg);

/// The 1-D validation reference selected by cfg.ref_kind.
ReferenceSignal make_reference(const ExperimentConfig& cfg);

/// Smooths the recorded states, fits p_k over each reference window,
/// propagates it one step and packs the off-policy training tuples.
std::vector<DataTuple> assemble_tuples(const ExperimentConfig& cfg, const CollectedData& data,
                                       const ReferenceSignal& training_ref);

struct TrainArtifacts {
  GainMatrix gain;           // physical coordinates (re-normalized)
  Eigen::VectorXd weights;   // normalized training coordinates
  TrainingTrace trace;
  std::string gain_path;
  std::string trace_path;
};

/// Full training run; writes gain.json, trace.csv and the resolved config
/// into out_dir (stem defaults to "gain").
TrainArtifacts run_train(const ExperimentConfig& cfg, const std::string& out_dir,
                         const std::string& stem = "gain");

/// Closed-loop rollout of one controller on a reference.
struct Rollout {
  std::vector<Eigen::Vector4d> states;       // measured, one per step
  std::vector<double> controls;
  std::vector<Eigen::VectorXd> ref_params;   // fitted p_k per step
  std::vector<double> reference;             // desired r_k per step
  std::vector<double> cost_curve;            // accumulated one-step cost
  bool edge_contact = false;

  double final_cost() const { return cost_curve.empty() ? 0.0 : cost_curve.back(); }
};

Rollout rollout(const GainMatrix& gain, const ReferenceSignal& ref, const ExperimentConfig& cfg,
                std::uint64_t seed);

struct ValidationArtifacts {
  std::vector<Rollout> repetitions;
  std::vector<double> mean_cost_curve;
  double final_cost_mean = 0.0;
  std::vector<std::string> csv_paths;
};

/// Validates each gain file on the configured reference; writes per-rep and
/// mean/std trajectory CSVs named after the gain file stem.
std::vector<ValidationArtifacts> run_validate(const ExperimentConfig& cfg,
                                              const std::vector<std::string>& gain_paths,
                                              const std::string& out_dir);

/// In-memory variant used by compare and the acceptance suite.
ValidationArtifacts validate_gain(const GainMatrix& gain, const ExperimentConfig& cfg,
                                  const std::string& out_dir, const std::string& stem);

struct CompareReport {
  GainMatrix learned;
  GainMatrix model;
  Eigen::VectorXd learned_w;   // normalized coordinates
  Eigen::VectorXd model_w;
  double max_rel_gain_diff = 0.0;
  double bellman_relative = 0.0;
  bool converged = false;
  int iterations = 0;
  double learned_final_cost = 0.0;
  double model_final_cost = 0.0;
  std::string report_path;
};

/// Trains the ADP controller, solves the model-based gain on the same plant
/// (in the same normalized coordinates) and reports elementwise differences
/// plus validation cost curves for both.
CompareReport run_compare(const ExperimentConfig& cfg, const std::string& out_dir);

/// Model-based gain for the configured plant, solved in normalized
/// coordinates and re-normalized; the exact Q weights come along for diffing.
GainFile model_based_gain(const ExperimentConfig& cfg);

/// Collects excitation data and writes data.csv.
std::string run_collect(const ExperimentConfig& cfg, const std::string& out_dir);

struct Rect2dArtifacts {
  TrainArtifacts axis_x;
  TrainArtifacts axis_y;
  std::vector<std::string> csv_paths;
  bool trained = false;
};

/// Two independently learned axis controllers tracking a rectangle. Uses the
/// provided gain files when exactly two are given, otherwise trains both
/// axes (seeds seed and seed + 1).
Rect2dArtifacts run_rect2d(const ExperimentConfig& cfg, const std::vector<std::string>& gain_paths,
                           const std::string& out_dir);

/// Emits a small matplotlib stub that plots the CSVs in out_dir.
std::string write_plot_stub(const std::string& out_dir);

}  // namespace adptrack
