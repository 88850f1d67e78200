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
#include <random>

#include "adptrack/errors.hpp"
#include "adptrack/qfunc.hpp"

using namespace adptrack;

namespace {

std::mt19937_64 rng(99);

double uniform(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

Eigen::VectorXd random_vec(long n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) {
    v[i] = scale * uniform(-1, 1);
  }
  return v;
}

}  // namespace

TEST_CASE("feature dimensions") {
  CHECK(FeatureLayout{3, true}.n_z() == 9);
  CHECK(FeatureLayout{3, true}.n_w() == 45);
  CHECK(FeatureLayout{1, true}.n_w() == 28);
  CHECK(FeatureLayout{3, false}.n_w() == 36);
  CHECK(FeatureLayout{1, false}.n_w() == 21);
}

TEST_CASE("constant-only input lights the constant-squared slot") {
  const FeatureLayout layout{3, true};
  const Eigen::VectorXd phi =
      features(layout, Eigen::Vector4d::Zero(), 0.0, Eigen::VectorXd::Zero(3));
  for (long i = 0; i + 1 < phi.size(); ++i) {
    CHECK(phi[i] == 0.0);
  }
  CHECK(phi[phi.size() - 1] == 1.0);  // (1, 1) diagonal slot
}

TEST_CASE("w^T phi equals z^T H z") {
  for (const FeatureLayout layout : {FeatureLayout{3, true}, FeatureLayout{1, true},
                                     FeatureLayout{3, false}, FeatureLayout{1, false}}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd w = random_vec(layout.n_w(), 2.0);
      const Eigen::Vector4d x = random_vec(4, 3.0);
      const double u = uniform(-3, 3);
      const Eigen::VectorXd p = random_vec(layout.n_p, 2.0);

      const Eigen::MatrixXd h = weights_to_matrix(layout, w);
      CHECK(h.isApprox(h.transpose(), 0.0));  // symmetric by construction

      const Eigen::VectorXd z = assemble_z(layout, x, u, p);
      const double quad = z.dot(h * z);
      const double lin = w.dot(features(layout, x, u, p));
      CHECK(std::abs(quad - lin) <= 1e-12 * std::max(1.0, std::abs(quad)));
      CHECK(q_value(layout, w, x, u, p) == lin);
    }
  }
}

TEST_CASE("weights/matrix conversions") {
  const FeatureLayout layout{3, true};

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(layout.n_w());
  const Eigen::MatrixXd h = weights_to_matrix(layout, ones);
  for (int i = 0; i < layout.n_z(); ++i) {
    for (int j = 0; j < layout.n_z(); ++j) {
      CHECK(h(i, j) == (i == j ? 1.0 : 0.5));
    }
  }

  const Eigen::VectorXd w_id = matrix_to_weights(Eigen::MatrixXd::Identity(9, 9));
  int idx = 0;
  for (int i = 0; i < 9; ++i) {
    for (int j = i; j < 9; ++j) {
      CHECK(w_id[idx] == (i == j ? 1.0 : 0.0));
      ++idx;
    }
  }

  // Bit-exact round trip.
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd w = random_vec(layout.n_w(), 5.0);
    const Eigen::VectorXd back = matrix_to_weights(weights_to_matrix(layout, w));
    for (long i = 0; i < w.size(); ++i) {
      CHECK(back[i] == w[i]);
    }
  }
}

TEST_CASE("q_value basics") {
  const FeatureLayout layout{3, true};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(layout.n_w());
  const Eigen::Vector4d x = random_vec(4);
  const Eigen::VectorXd p = random_vec(3);
  CHECK(q_value(layout, zero, x, 1.3, p) == 0.0);

  const Eigen::VectorXd w_id = matrix_to_weights(Eigen::MatrixXd::Identity(9, 9));
  const Eigen::VectorXd z = assemble_z(layout, x, 1.3, p);
  CHECK(q_value(layout, w_id, x, 1.3, p) == doctest::Approx(z.squaredNorm()).epsilon(1e-13));
}

TEST_CASE("quadratic scaling of the raw form") {
  const FeatureLayout layout{3, true};
  const Eigen::VectorXd w = random_vec(layout.n_w());
  const Eigen::MatrixXd h = weights_to_matrix(layout, w);
  const Eigen::VectorXd z = random_vec(layout.n_z());
  const double alpha = 1.7;
  const double scaled = (alpha * z).dot(h * (alpha * z));
  CHECK(scaled == doctest::Approx(alpha * alpha * z.dot(h * z)).epsilon(1e-13));
}

TEST_CASE("greedy gain from simple H matrices") {
  const FeatureLayout layout{3, true};
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(9, 9);
  h(0, 0) = 1.0;
  h(0, 1) = 1.0;
  h(1, 0) = 1.0;
  GainMatrix g = greedy_gain(layout, h);
  CHECK(g.lx()[0] == 1.0);
  CHECK(g.lx()[1] == 0.0);
  CHECK(g.lref().isZero(0.0));
  CHECK(g.loff() == 0.0);

  h.setZero();
  h(0, 0) = 2.0;
  h(0, 8) = 3.0;
  h(8, 0) = 3.0;
  g = greedy_gain(layout, h);
  CHECK(g.loff() == 1.5);

  h(0, 0) = 0.0;
  CHECK_THROWS_AS(greedy_gain(layout, h), NonConvexInControl);
  h(0, 0) = 1e-11;
  CHECK_THROWS_AS(greedy_gain(layout, h), NonConvexInControl);
}

TEST_CASE("greedy gain satisfies the first-order condition") {
  const FeatureLayout layout{3, true};
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Random(9, 9);
    h = (h + h.transpose()).eval();
    h(0, 0) = 1.0 + std::abs(h(0, 0));

    const GainMatrix g = greedy_gain(layout, h);
    const Eigen::Vector4d x = random_vec(4, 2.0);
    const Eigen::VectorXd p = random_vec(3, 2.0);
    const double u_star = policy_apply(g, x, p);

    const double foc = h.row(0).segment<4>(1).dot(x) + h.row(0).segment<3>(5).dot(p) + h(0, 8) +
                       h(0, 0) * u_star;
    CHECK(std::abs(foc) <= 1e-12 * (1.0 + std::abs(h(0, 0) * u_star)));
  }
}

TEST_CASE("closed-form minimizer agrees with a grid search") {
  const FeatureLayout layout{3, true};
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Random(9, 9);
    h = (h + h.transpose()).eval();
    h(0, 0) = 1.0 + std::abs(h(0, 0));
    const Eigen::VectorXd w = matrix_to_weights(h);

    const GainMatrix g = greedy_gain(layout, h);
    const Eigen::Vector4d x = random_vec(4);
    const Eigen::VectorXd p = random_vec(3);
    const double u_star = policy_apply(g, x, p);

    const int cells = 10000;
    const double span = 2.0;
    double best_u = u_star - 1.0;
    double best_q = q_value(layout, w, x, best_u, p);
    for (int i = 1; i <= cells; ++i) {
      const double u = u_star - 1.0 + span * static_cast<double>(i) / cells;
      const double q = q_value(layout, w, x, u, p);
      if (q < best_q) {
        best_q = q;
        best_u = u;
      }
    }
    CHECK(std::abs(best_u - u_star) <= span / cells + 1e-12);
  }
}

TEST_CASE("policy application") {
  const FeatureLayout layout{3, true};
  const GainMatrix zero = GainMatrix::zero(layout);
  CHECK(policy_apply(zero, random_vec(4), random_vec(3)) == 0.0);

  GainMatrix offset = GainMatrix::zero(layout);
  offset.coeffs[7] = 2.2;  // L_off
  CHECK(policy_apply(offset, Eigen::Vector4d::Zero(), Eigen::VectorXd::Zero(3)) == -2.2);

  for (int trial = 0; trial < 50; ++trial) {
    GainMatrix g;
    g.n_p = 3;
    g.offset_term = true;
    g.coeffs = random_vec(8, 4.0).transpose();
    const Eigen::Vector4d x = random_vec(4, 2.0);
    const Eigen::VectorXd p = random_vec(3, 2.0);
    Eigen::VectorXd xp1(8);
    xp1 << x, p, 1.0;
    const double expected = -g.coeffs.dot(xp1);
    CHECK(policy_apply(g, x, p) == doctest::Approx(expected).epsilon(1e-14));
  }
}
