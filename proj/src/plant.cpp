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

#include "adptrack/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "adptrack/errors.hpp"
#include "adptrack/reference.hpp"

namespace adptrack {

namespace {

void check_params(const PlantParams& p) {
  if (!(p.dt > 0.0)) {
    throw std::invalid_argument("PlantParams: dt must be positive");
  }
  if (p.c_u == 0.0) {
    throw std::invalid_argument("PlantParams: c_u must be nonzero");
  }
  if (!(p.k_ball > 0.0) || p.k_ball > 1.0) {
    throw std::invalid_argument("PlantParams: k_ball must lie in (0, 1]");
  }
}

// Uniform in [-1, 1) from the top 53 bits; keeps the stream layout fixed
// across standard library implementations.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller; one draw per call, discarding the sibling.
  double u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  u1 = std::max(u1, 0x1.0p-60);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

Discretized discretize(const PlantParams& params) {
  check_params(params);
  const double dt = params.dt;
  const double kg = params.k_ball * params.gravity;
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  const double dt4 = dt3 * dt;

  Discretized d;
  d.a << 1.0, dt, kg * dt2 / 2.0, kg * dt3 / 6.0,  //
      0.0, 1.0, kg * dt, kg * dt2 / 2.0,           //
      0.0, 0.0, 1.0, dt,                           //
      0.0, 0.0, 0.0, 1.0;
  d.b << params.c_u * kg * dt4 / 24.0, params.c_u * kg * dt3 / 6.0, params.c_u * dt2 / 2.0,
      params.c_u * dt;
  return d;
}

PlantState step(const PlantState& x, double u, const PlantParams& params) {
  const Discretized d = discretize(params);
  return PlantState::from_vec(d.a * x.vec() + d.b * (u + params.disturbance));
}

bool on_plate(const PlantState& x) { return std::abs(x.s) <= kPlateHalfWidth; }

CollectedData collect_data(const ExcitationConfig& exc, const PlantParams& params) {
  check_params(params);
  if (exc.sine_amps.size() != exc.sine_freqs.size()) {
    throw std::invalid_argument("ExcitationConfig: sine amps/freqs must match");
  }
  if (!(exc.duration > 0.0)) {
    throw std::invalid_argument("ExcitationConfig: duration must be positive");
  }
  const Discretized d = discretize(params);
  const long n = static_cast<long>(std::llround(exc.duration / params.dt));
  std::mt19937_64 rng(exc.seed);

  CollectedData data;
  data.states.reserve(static_cast<std::size_t>(n + 1));
  data.controls.reserve(static_cast<std::size_t>(n));

  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  auto measure = [&](const Eigen::Vector4d& truth) {
    if (params.noise_sigma <= 0.0) {
      return truth;
    }
    Eigen::Vector4d m = truth;
    for (int i = 0; i < 4; ++i) {
      m[i] += params.noise_sigma * gaussian(rng);
    }
    return m;
  };

  Eigen::Vector4d x_meas = measure(x);
  data.states.push_back(x_meas);
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * params.dt;
    double u = exc.trim - exc.stabilizer.dot(x_meas);
    for (std::size_t j = 0; j < exc.sine_amps.size(); ++j) {
      // Staggered phases so the components do not all cross zero at t = 0.
      u += exc.sine_amps[j] *
           std::sin(2.0 * std::numbers::pi * exc.sine_freqs[j] * t + 0.9 * static_cast<double>(j));
    }
    u += exc.noise_amp * uniform_pm1(rng);
    u = std::clamp(u, -exc.bound, exc.bound);

    x = d.a * x + d.b * (u + params.disturbance);
    if (std::abs(x[0]) > kPlateHalfWidth) {
      throw EdgeContact("collect_data: ball left the plate at step " + std::to_string(k + 1), k + 1);
    }
    x_meas = measure(x);
    data.states.push_back(x_meas);
    data.controls.push_back(u);
  }
  return data;
}

std::vector<Eigen::Vector4d> smooth(const std::vector<Eigen::Vector4d>& states, int window) {
  if (states.empty()) {
    throw std::invalid_argument("smooth: empty input");
  }
  if (window < 1) {
    throw std::invalid_argument("smooth: window must be >= 1");
  }
  if (window == 1) {
    return states;
  }
  std::vector<Eigen::Vector4d> out(states.size());
  Eigen::Vector4d acc = Eigen::Vector4d::Zero();
  for (std::size_t k = 0; k < states.size(); ++k) {
    acc += states[k];
    if (k >= static_cast<std::size_t>(window)) {
      acc -= states[k - static_cast<std::size_t>(window)];
    }
    const double len = static_cast<double>(std::min<std::size_t>(k + 1, window));
    out[k] = acc / len;
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_data_csv(const std::string& path, const CollectedData& data) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_data_csv: cannot open " + path);
  }
  out << "k,s,v,alpha,omega,u\n";
  for (std::size_t k = 0; k < data.states.size(); ++k) {
    const Eigen::Vector4d& x = data.states[k];
    out << k << ',' << format_double(x[0]) << ',' << format_double(x[1]) << ','
        << format_double(x[2]) << ',' << format_double(x[3]) << ',';
    if (k < data.controls.size()) {
      out << format_double(data.controls[k]);
    }
    out << '\n';
  }
}

CollectedData read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_data_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,s,v,alpha,omega,u", 0) != 0) {
    throw std::runtime_error("read_data_csv: missing header in " + path);
  }
  CollectedData data;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() < 5) {
      throw std::runtime_error("read_data_csv: malformed row: " + line);
    }
    Eigen::Vector4d x;
    for (int i = 0; i < 4; ++i) {
      x[i] = std::stod(cells[static_cast<std::size_t>(i + 1)]);
    }
    data.states.push_back(x);
    if (cells.size() >= 6 && !cells[5].empty()) {
      data.controls.push_back(std::stod(cells[5]));
    }
  }
  if (data.states.size() != data.controls.size() + 1) {
    throw std::runtime_error("read_data_csv: expected one more state row than control entries");
  }
  return data;
}

}  // namespace adptrack
