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

#include <cstdint>
#include <string>
#include <vector>

// Flat `key = value` experiment configuration. Parsing is strict: an unknown
// key is an error, so hyperparameter typos cannot pass silently. Defaults are
// the operating point used throughout: gamma 0.9, Q = diag(800, 0, 400, 0),
// R = 1, beta 0.8, h_r 10, V_N 10, eps 1e-6, N = 1200 tuples at dt = 40 ms.

namespace adptrack {

struct ExperimentConfig {
  // plant
  double dt = 0.04;
  double gravity = 9.81;
  double k_ball = 5.0 / 7.0;
  double c_u = 4.0;
  double disturbance = 0.0;
  double noise_sigma = 0.0;

  // excitation
  double exc_duration = 48.0;
  double exc_noise_amp = 0.5;
  double exc_bound = 3.0;
  double exc_trim = 0.0;
  std::vector<double> exc_sine_amps{0.4, 0.7, 0.9};
  std::vector<double> exc_sine_freqs{0.3, 0.7, 1.3};

  // training reference (sum of sines)
  std::vector<double> train_ref_amps{0.10, 0.06, 0.04};
  std::vector<double> train_ref_freqs{0.10, 0.23, 0.41};

  // reference approximation
  int n_p = 3;
  double beta = 0.8;
  int h_r = 10;

  // training
  double gamma = 0.9;
  std::vector<double> q_diag{800.0, 0.0, 400.0, 0.0};
  double r_cost = 1.0;
  double eps = 1e-6;
  int max_iter = 100;
  double ridge = 1e-8;
  double v_n = 10.0;
  int smooth_window = 5;
  long n_tuples = 1200;
  bool offset_term = true;
  int threads = 1;

  // validation
  std::string ref_kind = "sine-step";  // sine-step | composite | rectangle-2d | training
  double ref_amplitude = 0.15;
  double ref_period = 20.0;
  double val_duration = 40.0;
  double rect_width = 0.4;
  double rect_height = 0.3;
  int repetitions = 5;

  std::uint64_t seed = 1;
  std::string data_csv;  // optional: consume externally recorded data

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on unknown keys, duplicates or malformed values.
ExperimentConfig parse_config(const std::string& text);

/// Canonical form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

/// Cross-field checks (bounds, positivity); throws ConfigError.
void validate(const ExperimentConfig& cfg);

}  // namespace adptrack
