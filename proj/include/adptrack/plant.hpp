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
#include <cstdint>
#include <string>
#include <vector>

// One axis of the simulated ball-on-plate rig. Small-angle linearization of
// a rolling ball on a tilting plate,
//
//   s' = v,  v' = k_ball * g * alpha,  alpha' = omega,  omega' = c_u * (u + d),
//
// with motor current u (A) and a constant input-equivalent imbalance d (A).
// The chain is nilpotent, so the zero-order-hold discretization at dt is an
// exact finite polynomial of the continuous dynamics.

namespace adptrack {

struct PlantParams {
  double gravity = 9.81;        // m/s^2
  double k_ball = 5.0 / 7.0;    // rolling solid sphere
  double c_u = 4.0;             // plate angular acceleration per ampere, rad/s^2/A
  double disturbance = 0.0;     // constant input-equivalent imbalance, A
  double dt = 0.04;             // s
  double noise_sigma = 0.0;     // measurement noise scale (0 for oracle runs)
};

struct PlantState {
  double s = 0.0;      // ball position, m
  double v = 0.0;      // ball velocity, m/s
  double alpha = 0.0;  // plate angle, rad
  double omega = 0.0;  // plate angular velocity, rad/s

  Eigen::Vector4d vec() const { return {s, v, alpha, omega}; }
  static PlantState from_vec(const Eigen::Vector4d& x) { return {x[0], x[1], x[2], x[3]}; }
};

struct Discretized {
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
};

/// Exact ZOH discretization of the continuous chain at params.dt.
Discretized discretize(const PlantParams& params);

/// x' = A_d x + B_d (u + d). Noise-free; measurement noise is applied at
/// data-collection time.
PlantState step(const PlantState& x, double u, const PlantParams& params);

bool on_plate(const PlantState& x);

/// Synthetic excitation replacing the paper's manual plate excitation: a
/// fixed suboptimal stabilizing feedback holds the ball on the plate while a
/// sum of sinusoids plus uniform noise excites the input, all clamped to the
/// amplitude bound. The trim current mirrors the operator leveling out a
/// known imbalance; it is part of the behavior policy only.
struct ExcitationConfig {
  double duration = 48.0;                              // s
  double noise_amp = 0.5;                              // A, uniform in [-amp, amp]
  double bound = 3.0;                                  // A
  double trim = 0.0;                                   // A, constant feedforward
  std::vector<double> sine_amps{0.4, 0.7, 0.9};        // A
  std::vector<double> sine_freqs{0.3, 0.7, 1.3};       // Hz
  Eigen::RowVector4d stabilizer{0.57, 1.14, 6.0, 2.0};  // poles near -2 rad/s
  std::uint64_t seed = 1;
};

struct CollectedData {
  std::vector<Eigen::Vector4d> states;  // measured states, length N + 1
  std::vector<double> controls;         // applied currents, length N
  long tuple_count() const { return static_cast<long>(controls.size()); }
};

/// Deterministic given the seed. Throws EdgeContact if the ball leaves the
/// plate during collection.
CollectedData collect_data(const ExcitationConfig& exc, const PlantParams& params);

/// Trailing (causal) moving average per state channel; the first window-1
/// entries average the available prefix.
std::vector<Eigen::Vector4d> smooth(const std::vector<Eigen::Vector4d>& states, int window);

/// CSV schema `k, s, v, alpha, omega, u`; the final row carries the terminal
/// state with an empty control field. read_data_csv accepts the same schema,
/// serving as the import hook for externally recorded data.
void write_data_csv(const std::string& path, const CollectedData& data);
CollectedData read_data_csv(const std::string& path);

}  // namespace adptrack
