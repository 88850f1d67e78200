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

#include "adptrack/qfunc.hpp"
#include "adptrack/reference.hpp"

// Model-based comparison controller: discounted LQ tracking on the augmented
// state [x; p; 1]. The reference parameters evolve autonomously through
// T(1)^T, a constant input-equivalent disturbance is folded into the constant
// channel, and the tracking error e = [x_1 - p^T rho(0), x_2, x_3, x_4]
// induces the augmented cost Q_aug = M^T Q M.

namespace adptrack {

struct LinearModel {
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
};

/// Rank of [B AB A^2B A^3B] equals the state dimension.
bool is_controllable(const LinearModel& model);

struct AugModel {
  Eigen::MatrixXd a;  // (5 + n_p) x (5 + n_p)
  Eigen::VectorXd b;
  BasisSpec spec;

  int dim() const { return static_cast<int>(a.rows()); }
};

/// Block system [x; p; 1] with the disturbance column B*d routed through the
/// constant channel. Throws std::invalid_argument if (A, B) is uncontrollable.
AugModel augment(const LinearModel& model, const BasisSpec& spec, double disturbance);

/// M with e = M [x; p; 1]; exposed for the cost-encoding tests.
Eigen::MatrixXd tracking_error_map(const BasisSpec& spec);

struct DiscountedLqr {
  Eigen::MatrixXd p;
  Eigen::RowVectorXd gain;  // u = -gain * x
  int iterations = 0;
  double residual = 0.0;
};

/// Plain discounted Riccati value iteration for a single-input system,
///   P <- Q + gamma A^T (P - P B (R + gamma B^T P B)^{-1} B^T P) A,
/// gain L = (R + gamma B^T P B)^{-1} gamma B^T P A.
DiscountedLqr discounted_riccati(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& q, double r_cost, double gamma,
                                 double tol = 1e-10, long max_iter = 100000);

struct RiccatiSolution {
  Eigen::MatrixXd p;  // value matrix on the augmented state
  GainMatrix gain;    // [L_x | L_ref | L_off]
  int iterations = 0;
  double residual = 0.0;
};

/// Value iteration on the discounted Riccati recursion
///   P <- Q_aug + gamma A^T (P - P B (R + gamma B^T P B)^{-1} B^T P) A
/// until the sup-norm change falls below tol. gamma < 1 keeps the recursion
/// contractive despite the unit eigenvalues of the p and constant blocks.
/// Throws NotConverged past max_iter and std::invalid_argument for an
/// indefinite state cost.
RiccatiSolution solve_discounted_lqt(const AugModel& aug, const Eigen::Matrix4d& q_mat,
                                     double r_cost, double gamma, double tol = 1e-10,
                                     long max_iter = 100000);

/// Exact Q-function matrix of the solved problem in the [u; x; p; 1] layout,
///   H = [ R + g B'PB   g B'PA ; g A'PB   Q_aug + g A'PA ],
/// comparable entry-for-entry with the learned weights.
Eigen::MatrixXd optimal_q_matrix(const AugModel& aug, const Eigen::Matrix4d& q_mat, double r_cost,
                                 double gamma, const Eigen::MatrixXd& p);

}  // namespace adptrack
