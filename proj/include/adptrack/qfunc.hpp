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

// Quadratic Q-function over the augmented vector z = [u; x; p; 1] (the
// trailing constant slot is optional and enables learned static offset
// compensation). Q(x, u, p) = z^T H z = w^T phi(x, u, p) with H symmetric.
//
// Feature/weight convention, fixed here and nowhere else: phi holds the raw
// products z_i * z_j for i <= j in row-major upper-triangular order, and the
// weight vector absorbs the symmetry factor, w_ij = 2 H_ij for i < j and
// w_ii = H_ii. Both identities above then hold exactly.

namespace adptrack {

inline constexpr int kStateDim = 4;

struct FeatureLayout {
  int n_p = 3;              // reference parameter count (1 or 3)
  bool offset_term = true;  // include the constant slot in z

  int n_z() const { return 1 + kStateDim + n_p + (offset_term ? 1 : 0); }
  int n_w() const { return n_z() * (n_z() + 1) / 2; }
  int gain_size() const { return n_z() - 1; }
};

/// Packed index of the (i, j) upper-triangular entry, i <= j < n.
inline int triangular_index(int i, int j, int n) {
  return i * n - i * (i - 1) / 2 + (j - i);
}

/// z = [u; x; p; (1)]
Eigen::VectorXd assemble_z(const FeatureLayout& layout, const Eigen::Vector4d& x, double u,
                           const Eigen::VectorXd& p);

/// Writes phi(x, u, p) into out[0 .. n_w). No allocation; used by the
/// evaluation inner loop.
void features_into(const FeatureLayout& layout, const Eigen::Vector4d& x, double u,
                   const Eigen::VectorXd& p, double* out);

Eigen::VectorXd features(const FeatureLayout& layout, const Eigen::Vector4d& x, double u,
                         const Eigen::VectorXd& p);

/// w -> H; exact inverse of matrix_to_weights.
Eigen::MatrixXd weights_to_matrix(const FeatureLayout& layout, const Eigen::VectorXd& w);

/// H -> w (diagonal kept, off-diagonals doubled).
Eigen::VectorXd matrix_to_weights(const Eigen::MatrixXd& h);

/// w^T phi(x, u, p)
double q_value(const FeatureLayout& layout, const Eigen::VectorXd& w, const Eigen::Vector4d& x,
               double u, const Eigen::VectorXd& p);

/// Affine control law u = -(L_x x + L_ref p + L_off); the offset entry is
/// present only when the layout carries the constant slot.
struct GainMatrix {
  Eigen::RowVectorXd coeffs;  // [L_x | L_ref | (L_off)]
  int n_p = 3;
  bool offset_term = true;

  Eigen::RowVector4d lx() const { return coeffs.head<kStateDim>(); }
  Eigen::RowVectorXd lref() const { return coeffs.segment(kStateDim, n_p); }
  double loff() const { return offset_term ? coeffs[kStateDim + n_p] : 0.0; }

  static GainMatrix zero(const FeatureLayout& layout);
};

/// Minimizer of the quadratic Q over u: L = h_uu^{-1} [h_ux | h_up | h_u1].
/// Throws NonConvexInControl when h_uu <= 1e-10.
GainMatrix greedy_gain(const FeatureLayout& layout, const Eigen::MatrixXd& h);

double policy_apply(const GainMatrix& gain, const Eigen::Vector4d& x, const Eigen::VectorXd& p);

}  // namespace adptrack
