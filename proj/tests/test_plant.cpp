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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "adptrack/errors.hpp"
#include "adptrack/plant.hpp"
#include "adptrack/reference.hpp"

using namespace adptrack;

namespace {

// Closed-form chain response under constant input: the continuous dynamics
// integrate exactly to polynomials in t.
Eigen::Vector4d chain_solution(const Eigen::Vector4d& x0, double u, const PlantParams& prm,
                               double t) {
  const double kg = prm.k_ball * prm.gravity;
  const double acc = prm.c_u * (u + prm.disturbance);
  const double s0 = x0[0], v0 = x0[1], a0 = x0[2], w0 = x0[3];
  Eigen::Vector4d x;
  x[3] = w0 + acc * t;
  x[2] = a0 + w0 * t + acc * t * t / 2.0;
  x[1] = v0 + kg * (a0 * t + w0 * t * t / 2.0 + acc * t * t * t / 6.0);
  x[0] = s0 + v0 * t + kg * (a0 * t * t / 2.0 + w0 * t * t * t / 6.0 + acc * t * t * t * t / 24.0);
  return x;
}

}  // namespace

TEST_CASE("origin is an equilibrium") {
  const PlantParams prm;
  const PlantState next = step(PlantState{}, 0.0, prm);
  CHECK(next.vec().isZero(0.0));
}

TEST_CASE("discretization matches the quartic closed form") {
  PlantParams prm;
  prm.disturbance = 0.3;
  const Discretized d = discretize(prm);

  Eigen::Vector4d x;
  x << 0.02, -0.01, 0.03, -0.05;
  const double u = 1.4;

  // Single step.
  Eigen::Vector4d stepped = d.a * x + d.b * (u + prm.disturbance);
  Eigen::Vector4d exact = chain_solution(x, u, prm, prm.dt);
  CHECK((stepped - exact).cwiseAbs().maxCoeff() < 1e-12);

  // Multiple steps under the same constant input.
  for (int k = 0; k < 24; ++k) {
    stepped = d.a * stepped + d.b * (u + prm.disturbance);
  }
  exact = chain_solution(x, u, prm, 25 * prm.dt);
  CHECK((stepped - exact).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("velocity grows by k g alpha dt per step at held angle") {
  PlantParams prm;
  const double alpha0 = 0.01;
  PlantState x;
  x.alpha = alpha0;
  const PlantState next = step(x, 0.0, prm);  // u = -d = 0 keeps omega at rest
  const double kg_dt = prm.k_ball * prm.gravity * prm.dt;
  CHECK(kg_dt == doctest::Approx(0.2803).epsilon(1e-3));
  CHECK(next.v == doctest::Approx(kg_dt * alpha0).epsilon(1e-12));
  CHECK(next.omega == 0.0);
  CHECK(next.alpha == alpha0);
}

TEST_CASE("trim current cancels the imbalance") {
  PlantParams prm;
  prm.disturbance = -2.2;
  PlantState x;
  x.omega = 0.13;
  const PlantState next = step(x, 2.2, prm);
  CHECK(next.omega == 0.13);  // zero angular acceleration
  PlantParams clean;
  const PlantState ref = step(x, 0.0, clean);
  CHECK((next.vec() - ref.vec()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step is linear without disturbance") {
  const PlantParams prm;
  Eigen::Vector4d x1, x2;
  x1 << 0.1, -0.2, 0.02, 0.3;
  x2 << -0.05, 0.07, -0.01, 0.1;
  const double u1 = 0.7, u2 = -1.1;
  const Eigen::Vector4d lhs = step(PlantState::from_vec(x1 + x2), u1 + u2, prm).vec();
  const Eigen::Vector4d rhs = step(PlantState::from_vec(x1), u1, prm).vec() +
                              step(PlantState::from_vec(x2), u2, prm).vec() -
                              step(PlantState{}, 0.0, prm).vec();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("data collection is deterministic and stays on the plate") {
  PlantParams prm;
  ExcitationConfig exc;
  exc.seed = 2024;

  const CollectedData a = collect_data(exc, prm);
  const CollectedData b = collect_data(exc, prm);
  REQUIRE(a.states.size() == b.states.size());
  CHECK(a.tuple_count() == 1200);  // 48 s at 40 ms
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k] == b.states[k]);
  }
  for (std::size_t k = 0; k < a.controls.size(); ++k) {
    CHECK(a.controls[k] == b.controls[k]);
    CHECK(std::abs(a.controls[k]) <= exc.bound);
  }
  double max_s = 0.0;
  for (const auto& x : a.states) {
    max_s = std::max(max_s, std::abs(x[0]));
  }
  CHECK(max_s <= kPlateHalfWidth);
}

TEST_CASE("noisy collection differs across seeds but not across runs") {
  PlantParams prm;
  prm.noise_sigma = 1e-3;
  ExcitationConfig exc;
  exc.seed = 5;
  const CollectedData a = collect_data(exc, prm);
  const CollectedData b = collect_data(exc, prm);
  exc.seed = 6;
  const CollectedData c = collect_data(exc, prm);
  CHECK(a.states[10] == b.states[10]);
  CHECK(a.states[10] != c.states[10]);
}

TEST_CASE("zero excitation from the origin yields zero data") {
  PlantParams prm;
  ExcitationConfig exc;
  exc.duration = 2.0;
  exc.noise_amp = 0.0;
  exc.trim = 0.0;
  exc.sine_amps = {0.0};
  exc.sine_freqs = {1.0};
  const CollectedData data = collect_data(exc, prm);
  for (const auto& x : data.states) {
    CHECK(x.isZero(0.0));
  }
  for (double u : data.controls) {
    CHECK(u == 0.0);
  }
}

TEST_CASE("runaway input hits the plate edge") {
  PlantParams prm;
  ExcitationConfig exc;
  exc.duration = 48.0;
  exc.noise_amp = 0.0;
  exc.trim = 3.0;  // constant full current, no feedback
  exc.stabilizer.setZero();
  exc.sine_amps = {};
  exc.sine_freqs = {};
  CHECK_THROWS_AS(collect_data(exc, prm), EdgeContact);
  try {
    collect_data(exc, prm);
  } catch (const EdgeContact& e) {
    CHECK(e.step_index > 0);
  }
}

TEST_CASE("trailing moving average") {
  std::vector<Eigen::Vector4d> constant(20, Eigen::Vector4d::Constant(0.7));
  CHECK(smooth(constant, 1) == constant);
  const auto smoothed = smooth(constant, 5);
  for (const auto& x : smoothed) {
    CHECK((x - Eigen::Vector4d::Constant(0.7)).cwiseAbs().maxCoeff() < 1e-15);
  }

  // Ramp: the trailing average lags by (window-1)/2 slope steps.
  const double slope = 0.3;
  std::vector<Eigen::Vector4d> ramp(30);
  for (std::size_t k = 0; k < ramp.size(); ++k) {
    ramp[k] = Eigen::Vector4d::Constant(slope * static_cast<double>(k));
  }
  const int window = 5;
  const auto ma = smooth(ramp, window);
  for (std::size_t k = window; k < ramp.size(); ++k) {
    const double expected = slope * static_cast<double>(k) - slope * (window - 1) / 2.0;
    CHECK(ma[k][0] == doctest::Approx(expected).epsilon(1e-12));
  }

  CHECK_THROWS_AS(smooth({}, 3), std::invalid_argument);
}

TEST_CASE("data CSV round-trips exactly") {
  PlantParams prm;
  ExcitationConfig exc;
  exc.duration = 1.0;
  const CollectedData data = collect_data(exc, prm);
  const std::string path = "plant_test_data.csv";
  write_data_csv(path, data);
  const CollectedData back = read_data_csv(path);
  REQUIRE(back.states.size() == data.states.size());
  REQUIRE(back.controls.size() == data.controls.size());
  for (std::size_t k = 0; k < data.states.size(); ++k) {
    CHECK(back.states[k] == data.states[k]);
  }
  for (std::size_t k = 0; k < data.controls.size(); ++k) {
    CHECK(back.controls[k] == data.controls[k]);
  }
  std::remove(path.c_str());
}
