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
#include <string>
#include <vector>

#include "adptrack/qfunc.hpp"
#include "adptrack/reference.hpp"

// Off-policy least-squares policy iteration. Policy evaluation solves the
// LSTDQ fixed-point system
//
//   ( sum_k phi_k (phi_k - gamma phi'_k)^T + ridge I ) w = sum_k phi_k c_k,
//
// with phi'_k evaluated at the greedy action of the current policy, and the
// improvement step is the closed-form gain from qfunc. The same recorded
// tuple batch is reused in every iteration.

namespace adptrack {

/// One off-policy training sample; p_next is the one-step propagated
/// parameter vector, p_next = propagate_params(p, 1).
struct DataTuple {
  Eigen::Vector4d x;
  double u = 0.0;
  Eigen::Vector4d x_next;
  Eigen::VectorXd p;
  Eigen::VectorXd p_next;
};

struct TrainConfig {
  double gamma = 0.9;
  Eigen::Matrix4d q_mat = Eigen::Vector4d(800.0, 0.0, 400.0, 0.0).asDiagonal();
  double r_cost = 1.0;
  double eps = 1e-6;     // stopping tolerance on ||w_l - w_{l-1}||_2
  int max_iter = 100;
  double ridge = 1e-8;   // regularization of the fixed-point system
  double v_n = 10.0;     // normalization factor for states and parameters
  int threads = 1;       // chunked parallel reduction over tuples
};

struct TrainingTrace {
  std::vector<Eigen::VectorXd> weights;  // w_l per iteration (normalized coordinates)
  std::vector<double> deltas;            // ||w_l - w_{l-1}||_2
  bool converged = false;
  int iterations = 0;
};

struct TrainResult {
  GainMatrix gain;
  Eigen::VectorXd weights;
  TrainingTrace trace;
};

/// c = e^T Q e + u R u with e = [x_1 - r0, x_2, x_3, x_4].
double stage_cost(const Eigen::Vector4d& x, double u, double r0, const TrainConfig& cfg);

/// One policy-evaluation step for the policy induced by `gain`.
/// Throws SingularEvaluation or NumericalFailure.
Eigen::VectorXd lstdq_evaluate(const std::vector<DataTuple>& tuples, const GainMatrix& gain,
                               const TrainConfig& cfg, const FeatureLayout& layout,
                               const BasisSpec& spec);

/// Alternates lstdq_evaluate and greedy_gain starting from all-ones weights
/// until the weight change drops below cfg.eps or max_iter is hit (result is
/// still returned, flagged via trace.converged).
TrainResult policy_iterate(const std::vector<DataTuple>& tuples, const TrainConfig& cfg,
                           const FeatureLayout& layout, const BasisSpec& spec);

/// Scales states and parameter vectors by v_n (controls untouched).
std::vector<DataTuple> normalize(const std::vector<DataTuple>& tuples, double v_n);

/// Maps a gain learned in normalized coordinates back to physical units:
/// L_x and L_ref scale by v_n, the offset is unchanged.
GainMatrix renormalize_gain(const GainMatrix& gain, double v_n);

/// Partial sums of the undiscounted one-step cost along a trajectory,
/// c(x_k, u_k, eval_ref(p_k, 0)).
std::vector<double> accumulated_cost(const std::vector<Eigen::Vector4d>& states,
                                     const std::vector<double>& controls,
                                     const std::vector<Eigen::VectorXd>& refs_p,
                                     const TrainConfig& cfg, const BasisSpec& spec);

/// Mean absolute TD residual of (w, gain) over the tuples, and the mean
/// absolute stage cost for scale.
struct BellmanResidual {
  double mean_abs_residual = 0.0;
  double mean_abs_cost = 0.0;
  double relative() const { return mean_abs_cost > 0.0 ? mean_abs_residual / mean_abs_cost : 0.0; }
};
BellmanResidual bellman_residual(const std::vector<DataTuple>& tuples, const Eigen::VectorXd& w,
                                 const GainMatrix& gain, const TrainConfig& cfg,
                                 const FeatureLayout& layout, const BasisSpec& spec);

/// Trace CSV export, columns `iter, delta, w_0..w_{n_w-1}`.
void write_trace_csv(const std::string& path, const TrainingTrace& trace);

}  // namespace adptrack
