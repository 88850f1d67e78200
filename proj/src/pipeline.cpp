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

#include "adptrack/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "adptrack/baseline.hpp"
#include "adptrack/errors.hpp"

namespace adptrack {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

double gaussian(std::mt19937_64& rng) {
  double u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  u1 = std::max(u1, 0x1.0p-60);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

PlantParams plant_params(const ExperimentConfig& cfg) {
  PlantParams p;
  p.gravity = cfg.gravity;
  p.k_ball = cfg.k_ball;
  p.c_u = cfg.c_u;
  p.disturbance = cfg.disturbance;
  p.dt = cfg.dt;
  p.noise_sigma = cfg.noise_sigma;
  return p;
}

ExcitationConfig excitation_config(const ExperimentConfig& cfg) {
  ExcitationConfig e;
  e.duration = cfg.exc_duration;
  e.noise_amp = cfg.exc_noise_amp;
  e.bound = cfg.exc_bound;
  e.trim = cfg.exc_trim;
  e.sine_amps = cfg.exc_sine_amps;
  e.sine_freqs = cfg.exc_sine_freqs;
  e.seed = cfg.seed;
  return e;
}

TrainConfig train_config(const ExperimentConfig& cfg) {
  TrainConfig t;
  t.gamma = cfg.gamma;
  t.q_mat = Eigen::Vector4d(cfg.q_diag[0], cfg.q_diag[1], cfg.q_diag[2], cfg.q_diag[3])
                .asDiagonal();
  t.r_cost = cfg.r_cost;
  t.eps = cfg.eps;
  t.max_iter = cfg.max_iter;
  t.ridge = cfg.ridge;
  t.v_n = cfg.v_n;
  t.threads = cfg.threads;
  return t;
}

BasisSpec basis_spec(const ExperimentConfig& cfg) { return {cfg.n_p, cfg.dt}; }

FitConfig fit_config(const ExperimentConfig& cfg) { return {cfg.beta, cfg.h_r}; }

FeatureLayout feature_layout(const ExperimentConfig& cfg) { return {cfg.n_p, cfg.offset_term}; }

ReferenceSignal make_reference(const ExperimentConfig& cfg) {
  if (cfg.ref_kind == "sine-step") {
    return make_sine_step(cfg.ref_amplitude, cfg.ref_period, cfg.val_duration, cfg.dt);
  }
  if (cfg.ref_kind == "composite") {
    return make_validation_composite(cfg.val_duration, cfg.dt);
  }
  if (cfg.ref_kind == "training") {
    return make_training_reference(cfg.train_ref_amps, cfg.train_ref_freqs, cfg.val_duration,
                                   cfg.dt);
  }
  throw ConfigError("make_reference: ref_kind '" + cfg.ref_kind +
                    "' is not a 1-D reference (use the rect2d command)");
}

std::vector<DataTuple> assemble_tuples(const ExperimentConfig& cfg, const CollectedData& data,
                                       const ReferenceSignal& training_ref) {
  const long n = cfg.n_tuples;
  if (data.tuple_count() < n) {
    throw std::invalid_argument("assemble_tuples: not enough collected data for n_tuples");
  }
  const BasisSpec spec = basis_spec(cfg);
  const FitConfig fit = fit_config(cfg);
  const auto smoothed = smooth(data.states, cfg.smooth_window);

  std::vector<DataTuple> tuples;
  tuples.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    DataTuple t;
    t.x = smoothed[static_cast<std::size_t>(k)];
    t.u = data.controls[static_cast<std::size_t>(k)];
    t.x_next = smoothed[static_cast<std::size_t>(k + 1)];
    t.p = fit_params(training_ref.window(k, fit.horizon), fit, spec);
    t.p_next = propagate_params(t.p, spec, 1);
    tuples.push_back(std::move(t));
  }
  return tuples;
}

namespace {

struct TrainedController {
  GainMatrix gain_physical;
  Eigen::VectorXd weights;
  TrainingTrace trace;
};

TrainedController train_controller(const ExperimentConfig& cfg) {
  validate(cfg);
  CollectedData data;
  if (!cfg.data_csv.empty()) {
    data = read_data_csv(cfg.data_csv);
  } else {
    data = collect_data(excitation_config(cfg), plant_params(cfg));
  }
  const double ref_duration = static_cast<double>(cfg.n_tuples + cfg.h_r + 1) * cfg.dt;
  const ReferenceSignal training_ref =
      make_training_reference(cfg.train_ref_amps, cfg.train_ref_freqs, ref_duration, cfg.dt);

  auto tuples = assemble_tuples(cfg, data, training_ref);
  const auto normalized = normalize(tuples, cfg.v_n);

  const auto result =
      policy_iterate(normalized, train_config(cfg), feature_layout(cfg), basis_spec(cfg));

  TrainedController out;
  out.gain_physical = renormalize_gain(result.gain, cfg.v_n);
  out.weights = result.weights;
  out.trace = result.trace;
  return out;
}

}  // namespace

TrainArtifacts run_train(const ExperimentConfig& cfg, const std::string& out_dir,
                         const std::string& stem) {
  ensure_dir(out_dir);
  const TrainedController trained = train_controller(cfg);

  TrainArtifacts art;
  art.gain = trained.gain_physical;
  art.weights = trained.weights;
  art.trace = trained.trace;
  art.gain_path = join_path(out_dir, stem + ".json");
  art.trace_path = join_path(out_dir, stem + "_trace.csv");

  GainFile file;
  file.n_p = cfg.n_p;
  file.normalized = true;
  file.w = trained.weights;
  file.gain = trained.gain_physical;
  save_gain_json(art.gain_path, file);
  write_trace_csv(art.trace_path, trained.trace);
  save_config(join_path(out_dir, stem + "_config.cfg"), cfg);
  return art;
}

Rollout rollout(const GainMatrix& gain, const ReferenceSignal& ref, const ExperimentConfig& cfg,
                std::uint64_t seed) {
  const PlantParams params = plant_params(cfg);
  const Discretized d = discretize(params);
  const BasisSpec spec{gain.n_p, cfg.dt};
  const FitConfig fit{cfg.beta, cfg.h_r};
  const long n = static_cast<long>(std::llround(cfg.val_duration / cfg.dt));
  std::mt19937_64 rng(seed);

  Rollout out;
  out.states.reserve(static_cast<std::size_t>(n));
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  for (long k = 0; k < n; ++k) {
    Eigen::Vector4d x_meas = x;
    if (params.noise_sigma > 0.0) {
      for (int i = 0; i < 4; ++i) {
        x_meas[i] += params.noise_sigma * gaussian(rng);
      }
    }
    const Eigen::VectorXd p = fit_params(ref.window(k, fit.horizon), fit, spec);
    const double u = policy_apply(gain, x_meas, p);

    out.states.push_back(x_meas);
    out.controls.push_back(u);
    out.ref_params.push_back(p);
    out.reference.push_back(ref.at(k));

    x = d.a * x + d.b * (u + params.disturbance);
    if (std::abs(x[0]) > kPlateHalfWidth) {
      out.edge_contact = true;
      break;
    }
  }
  out.cost_curve = accumulated_cost(out.states, out.controls, out.ref_params, train_config(cfg),
                                    spec);
  return out;
}

namespace {

void write_rollout_csv(const std::string& path, const Rollout& r, double dt) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_rollout_csv: cannot open " + path);
  }
  out << "k,t,r,s,v,alpha,omega,u,cost_acc\n";
  for (std::size_t k = 0; k < r.states.size(); ++k) {
    out << k << ',' << fmt(static_cast<double>(k) * dt) << ',' << fmt(r.reference[k]) << ','
        << fmt(r.states[k][0]) << ',' << fmt(r.states[k][1]) << ',' << fmt(r.states[k][2]) << ','
        << fmt(r.states[k][3]) << ',' << fmt(r.controls[k]) << ',' << fmt(r.cost_curve[k]) << '\n';
  }
}

void write_mean_csv(const std::string& path, const std::vector<Rollout>& reps, double dt) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_mean_csv: cannot open " + path);
  }
  std::size_t n = reps.front().states.size();
  for (const auto& r : reps) {
    n = std::min(n, r.states.size());
  }
  const double m = static_cast<double>(reps.size());
  out << "k,t,r,s_mean,s_std,cost_acc_mean\n";
  for (std::size_t k = 0; k < n; ++k) {
    double s_mean = 0.0;
    double cost_mean = 0.0;
    for (const auto& r : reps) {
      s_mean += r.states[k][0];
      cost_mean += r.cost_curve[k];
    }
    s_mean /= m;
    cost_mean /= m;
    double var = 0.0;
    for (const auto& r : reps) {
      var += (r.states[k][0] - s_mean) * (r.states[k][0] - s_mean);
    }
    const double s_std = std::sqrt(var / m);
    out << k << ',' << fmt(static_cast<double>(k) * dt) << ',' << fmt(reps.front().reference[k])
        << ',' << fmt(s_mean) << ',' << fmt(s_std) << ',' << fmt(cost_mean) << '\n';
  }
}

}  // namespace

ValidationArtifacts validate_gain(const GainMatrix& gain, const ExperimentConfig& cfg,
                                  const std::string& out_dir, const std::string& stem) {
  ensure_dir(out_dir);
  const ReferenceSignal ref = make_reference(cfg);

  ValidationArtifacts art;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    Rollout r = rollout(gain, ref, cfg, cfg.seed + static_cast<std::uint64_t>(rep));
    const std::string path = join_path(out_dir, stem + "_rep" + std::to_string(rep) + ".csv");
    write_rollout_csv(path, r, cfg.dt);
    art.csv_paths.push_back(path);
    art.repetitions.push_back(std::move(r));
  }
  const std::string mean_path = join_path(out_dir, stem + "_mean.csv");
  write_mean_csv(mean_path, art.repetitions, cfg.dt);
  art.csv_paths.push_back(mean_path);

  std::size_t n = art.repetitions.front().cost_curve.size();
  for (const auto& r : art.repetitions) {
    n = std::min(n, r.cost_curve.size());
  }
  art.mean_cost_curve.assign(n, 0.0);
  for (const auto& r : art.repetitions) {
    for (std::size_t k = 0; k < n; ++k) {
      art.mean_cost_curve[k] += r.cost_curve[k];
    }
  }
  for (auto& c : art.mean_cost_curve) {
    c /= static_cast<double>(cfg.repetitions);
  }
  art.final_cost_mean = art.mean_cost_curve.empty() ? 0.0 : art.mean_cost_curve.back();
  return art;
}

std::vector<ValidationArtifacts> run_validate(const ExperimentConfig& cfg,
                                              const std::vector<std::string>& gain_paths,
                                              const std::string& out_dir) {
  validate(cfg);
  if (gain_paths.empty()) {
    throw std::invalid_argument("run_validate: at least one gain file is required");
  }
  std::vector<ValidationArtifacts> out;
  for (const auto& path : gain_paths) {
    const GainFile file = load_gain_json(path);
    const std::string stem = fs::path(path).stem().string();
    out.push_back(validate_gain(file.gain, cfg, out_dir, stem));
  }
  write_plot_stub(out_dir);
  return out;
}

GainFile model_based_gain(const ExperimentConfig& cfg) {
  const Discretized d = discretize(plant_params(cfg));
  // Solve in the same normalized coordinates the learner uses: scaling the
  // states by V_N scales the input column, and the learned offset lives in
  // the unscaled channel.
  LinearModel normalized_model{d.a, cfg.v_n * d.b};
  const BasisSpec spec = basis_spec(cfg);
  const AugModel aug = augment(normalized_model, spec, cfg.disturbance);
  const TrainConfig t = train_config(cfg);
  const RiccatiSolution sol = solve_discounted_lqt(aug, t.q_mat, t.r_cost, t.gamma);

  GainFile file;
  file.n_p = cfg.n_p;
  file.normalized = true;
  file.w = matrix_to_weights(optimal_q_matrix(aug, t.q_mat, t.r_cost, t.gamma, sol.p));
  file.gain = renormalize_gain(sol.gain, cfg.v_n);
  return file;
}

CompareReport run_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  ensure_dir(out_dir);

  const TrainArtifacts learned = run_train(cfg, out_dir, "gain_adp");
  const GainFile model = model_based_gain(cfg);
  save_gain_json(join_path(out_dir, "gain_model.json"), model);

  CompareReport report;
  report.learned = learned.gain;
  report.model = model.gain;
  report.learned_w = learned.weights;
  report.model_w = model.w;
  report.converged = learned.trace.converged;
  report.iterations = learned.trace.iterations;

  // Mixed relative difference: near-zero entries (the offset with d = 0)
  // are measured against the gain's overall scale instead.
  const double scale = model.gain.coeffs.cwiseAbs().maxCoeff();
  Eigen::RowVectorXd rel(learned.gain.coeffs.size());
  for (long i = 0; i < rel.size(); ++i) {
    const double denom = std::max(std::abs(model.gain.coeffs[i]), 1e-3 * scale);
    rel[i] = std::abs(learned.gain.coeffs[i] - model.gain.coeffs[i]) / denom;
  }
  report.max_rel_gain_diff = rel.maxCoeff();

  if (cfg.ref_kind != "rectangle-2d") {
    const auto val_learned = validate_gain(learned.gain, cfg, out_dir, "val_adp");
    const auto val_model = validate_gain(model.gain, cfg, out_dir, "val_model");
    report.learned_final_cost = val_learned.final_cost_mean;
    report.model_final_cost = val_model.final_cost_mean;
  }

  nlohmann::json j;
  j["gain_adp"] = std::vector<double>(learned.gain.coeffs.data(),
                                      learned.gain.coeffs.data() + learned.gain.coeffs.size());
  j["gain_model"] = std::vector<double>(model.gain.coeffs.data(),
                                        model.gain.coeffs.data() + model.gain.coeffs.size());
  j["rel_diff"] = std::vector<double>(rel.data(), rel.data() + rel.size());
  j["max_rel_gain_diff"] = report.max_rel_gain_diff;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["offset_current_adp"] = -learned.gain.loff();
  j["disturbance"] = cfg.disturbance;
  j["final_cost_adp"] = report.learned_final_cost;
  j["final_cost_model"] = report.model_final_cost;
  report.report_path = join_path(out_dir, "compare_report.json");
  std::ofstream out(report.report_path);
  out << j.dump(2) << '\n';
  write_plot_stub(out_dir);
  return report;
}

std::string run_collect(const ExperimentConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  ensure_dir(out_dir);
  const CollectedData data = collect_data(excitation_config(cfg), plant_params(cfg));
  const std::string path = join_path(out_dir, "data.csv");
  write_data_csv(path, data);
  return path;
}

Rect2dArtifacts run_rect2d(const ExperimentConfig& cfg, const std::vector<std::string>& gain_paths,
                           const std::string& out_dir) {
  validate(cfg);
  ensure_dir(out_dir);

  Rect2dArtifacts art;
  GainMatrix gain_x;
  GainMatrix gain_y;
  if (gain_paths.size() == 2) {
    gain_x = load_gain_json(gain_paths[0]).gain;
    gain_y = load_gain_json(gain_paths[1]).gain;
  } else if (gain_paths.empty()) {
    ExperimentConfig cfg_x = cfg;
    ExperimentConfig cfg_y = cfg;
    cfg_y.seed = cfg.seed + 1;
    art.axis_x = run_train(cfg_x, out_dir, "gain_x");
    art.axis_y = run_train(cfg_y, out_dir, "gain_y");
    gain_x = art.axis_x.gain;
    gain_y = art.axis_y.gain;
    art.trained = true;
  } else {
    throw std::invalid_argument("run_rect2d: pass exactly two --gain files or none");
  }

  const auto [ref_x, ref_y] =
      make_rectangle_2d(cfg.rect_width, cfg.rect_height, cfg.ref_period, cfg.val_duration, cfg.dt);

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed = cfg.seed + static_cast<std::uint64_t>(rep);
    const Rollout rx = rollout(gain_x, ref_x, cfg, rep_seed);
    const Rollout ry = rollout(gain_y, ref_y, cfg, rep_seed + 1000003);

    const std::string path = join_path(out_dir, "rect_rep" + std::to_string(rep) + ".csv");
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error("run_rect2d: cannot open " + path);
    }
    out << "k,t,rx,ry,sx,sy,ux,uy,cost_acc_x,cost_acc_y\n";
    const std::size_t n = std::min(rx.states.size(), ry.states.size());
    for (std::size_t k = 0; k < n; ++k) {
      out << k << ',' << fmt(static_cast<double>(k) * cfg.dt) << ',' << fmt(rx.reference[k]) << ','
          << fmt(ry.reference[k]) << ',' << fmt(rx.states[k][0]) << ',' << fmt(ry.states[k][0])
          << ',' << fmt(rx.controls[k]) << ',' << fmt(ry.controls[k]) << ','
          << fmt(rx.cost_curve[k]) << ',' << fmt(ry.cost_curve[k]) << '\n';
    }
    art.csv_paths.push_back(path);
  }
  write_plot_stub(out_dir);
  return art;
}

std::string write_plot_stub(const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string path = join_path(out_dir, "plot.py");
  std::ofstream out(path);
  out << "#!/usr/bin/env python3\n"
         "\"\"\"Quick-look plots for the CSV artifacts in this directory.\"\"\"\n"
         "import glob\n"
         "import os\n"
         "\n"
         "import matplotlib.pyplot as plt\n"
         "import pandas as pd\n"
         "\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "for path in sorted(glob.glob(os.path.join(here, '*_mean.csv'))):\n"
         "    df = pd.read_csv(path)\n"
         "    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True)\n"
         "    ax0.plot(df['t'], df['r'], 'k', label='reference')\n"
         "    ax0.plot(df['t'], df['s_mean'], label='ball position')\n"
         "    ax0.fill_between(df['t'], df['s_mean'] - df['s_std'],\n"
         "                     df['s_mean'] + df['s_std'], alpha=0.3)\n"
         "    ax0.set_ylabel('position [m]')\n"
         "    ax0.legend()\n"
         "    ax1.plot(df['t'], df['cost_acc_mean'])\n"
         "    ax1.set_xlabel('t [s]')\n"
         "    ax1.set_ylabel('accumulated cost')\n"
         "    fig.suptitle(os.path.basename(path))\n"
         "for path in sorted(glob.glob(os.path.join(here, 'rect_rep0.csv'))):\n"
         "    df = pd.read_csv(path)\n"
         "    fig, ax = plt.subplots()\n"
         "    ax.plot(df['rx'], df['ry'], 'k', label='reference')\n"
         "    ax.plot(df['sx'], df['sy'], label='ball')\n"
         "    ax.set_aspect('equal')\n"
         "    ax.legend()\n"
         "plt.show()\n";
  return path;
}

}  // namespace adptrack
