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

#include "adptrack/baseline.hpp"

#include <cmath>
#include <stdexcept>

#include "adptrack/errors.hpp"

namespace adptrack {

bool is_controllable(const LinearModel& model) {
  Eigen::Matrix4d ctrb;
  Eigen::Vector4d col = model.b;
  for (int i = 0; i < 4; ++i) {
    ctrb.col(i) = col;
    col = model.a * col;
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(ctrb);
  lu.setThreshold(1e-10);
  return lu.rank() == 4;
}

AugModel augment(const LinearModel& model, const BasisSpec& spec, double disturbance) {
  if (!is_controllable(model)) {
    throw std::invalid_argument("augment: (A, B) pair is not controllable");
  }
  const int n = 5 + spec.n_p;
  AugModel aug;
  aug.spec = spec;
  aug.a = Eigen::MatrixXd::Zero(n, n);
  aug.a.topLeftCorner<4, 4>() = model.a;
  aug.a.block(4, 4, spec.n_p, spec.n_p) = shift_matrix(spec, 1).transpose();
  aug.a(n - 1, n - 1) = 1.0;
  aug.a.block(0, n - 1, 4, 1) = model.b * disturbance;
  aug.b = Eigen::VectorXd::Zero(n);
  aug.b.head<4>() = model.b;
  return aug;
}

Eigen::MatrixXd tracking_error_map(const BasisSpec& spec) {
  const int n = 5 + spec.n_p;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, n);
  m.topLeftCorner<4, 4>().setIdentity();
  m.block(0, 4, 1, spec.n_p) = -eval_basis(spec, 0).transpose();
  return m;
}

DiscountedLqr discounted_riccati(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& q, double r_cost, double gamma, double tol,
                                 long max_iter) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("discounted_riccati: gamma must lie in (0, 1]");
  }
  if (!(r_cost > 0.0)) {
    throw std::invalid_argument("discounted_riccati: R must be positive");
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    if (es.eigenvalues().minCoeff() < -1e-12) {
      throw std::invalid_argument("discounted_riccati: state cost is indefinite");
    }
  }

  const long n = a.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  DiscountedLqr sol;
  for (long it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd pb = p * b;
    const double denom = r_cost + gamma * b.dot(pb);
    const Eigen::RowVectorXd gain = (gamma / denom) * (pb.transpose() * a);
    const Eigen::MatrixXd p_raw =
        q + gamma * a.transpose() * p * a - gamma * (a.transpose() * pb) * gain;
    Eigen::MatrixXd p_next = 0.5 * (p_raw + p_raw.transpose());

    const double diff = (p_next - p).cwiseAbs().maxCoeff();
    p.swap(p_next);
    {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
      if (es.eigenvalues().minCoeff() < -1e-10) {
        throw NumericalFailure("discounted_riccati: value matrix lost positive semidefiniteness");
      }
    }
    if (diff <= tol) {
      sol.iterations = static_cast<int>(it);
      sol.residual = diff;
      break;
    }
    if (it == max_iter) {
      throw NotConverged("discounted_riccati: recursion did not converge");
    }
  }

  sol.p = p;
  const Eigen::VectorXd pb = p * b;
  const double denom = r_cost + gamma * b.dot(pb);
  sol.gain = (gamma / denom) * (pb.transpose() * a);
  return sol;
}

RiccatiSolution solve_discounted_lqt(const AugModel& aug, const Eigen::Matrix4d& q_mat,
                                     double r_cost, double gamma, double tol, long max_iter) {
  const Eigen::MatrixXd m = tracking_error_map(aug.spec);
  const Eigen::MatrixXd q_aug = m.transpose() * q_mat * m;
  const DiscountedLqr lqr = discounted_riccati(aug.a, aug.b, q_aug, r_cost, gamma, tol, max_iter);

  RiccatiSolution sol;
  sol.p = lqr.p;
  sol.iterations = lqr.iterations;
  sol.residual = lqr.residual;
  sol.gain.n_p = aug.spec.n_p;
  sol.gain.offset_term = true;
  sol.gain.coeffs = lqr.gain;
  return sol;
}

Eigen::MatrixXd optimal_q_matrix(const AugModel& aug, const Eigen::Matrix4d& q_mat, double r_cost,
                                 double gamma, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd m = tracking_error_map(aug.spec);
  const Eigen::MatrixXd q_aug = m.transpose() * q_mat * m;
  const int n = aug.dim();
  Eigen::MatrixXd h(n + 1, n + 1);
  const Eigen::VectorXd pb = p * aug.b;
  h(0, 0) = r_cost + gamma * aug.b.dot(pb);
  h.block(0, 1, 1, n) = gamma * pb.transpose() * aug.a;
  h.block(1, 0, n, 1) = h.block(0, 1, 1, n).transpose();
  h.block(1, 1, n, n) = q_aug + gamma * aug.a.transpose() * p * aug.a;
  return 0.5 * (h + h.transpose());
}

}  // namespace adptrack
