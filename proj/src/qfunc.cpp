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

#include "adptrack/qfunc.hpp"

#include <stdexcept>

#include "adptrack/errors.hpp"

namespace adptrack {

namespace {

constexpr double kConvexityThreshold = 1e-10;

void check_layout(const FeatureLayout& layout, const Eigen::VectorXd& p) {
  if (layout.n_p != 1 && layout.n_p != 3) {
    throw std::invalid_argument("FeatureLayout: n_p must be 1 or 3");
  }
  if (p.size() != layout.n_p) {
    throw std::invalid_argument("FeatureLayout: parameter vector has wrong dimension");
  }
}

}  // namespace

Eigen::VectorXd assemble_z(const FeatureLayout& layout, const Eigen::Vector4d& x, double u,
                           const Eigen::VectorXd& p) {
  check_layout(layout, p);
  Eigen::VectorXd z(layout.n_z());
  z[0] = u;
  z.segment<kStateDim>(1) = x;
  z.segment(1 + kStateDim, layout.n_p) = p;
  if (layout.offset_term) {
    z[layout.n_z() - 1] = 1.0;
  }
  return z;
}

void features_into(const FeatureLayout& layout, const Eigen::Vector4d& x, double u,
                   const Eigen::VectorXd& p, double* out) {
  const int nz = layout.n_z();
  double zbuf[16];
  zbuf[0] = u;
  for (int i = 0; i < kStateDim; ++i) zbuf[1 + i] = x[i];
  for (int i = 0; i < layout.n_p; ++i) zbuf[1 + kStateDim + i] = p[i];
  if (layout.offset_term) zbuf[nz - 1] = 1.0;

  int idx = 0;
  for (int i = 0; i < nz; ++i) {
    const double zi = zbuf[i];
    for (int j = i; j < nz; ++j) {
      out[idx++] = zi * zbuf[j];
    }
  }
}

Eigen::VectorXd features(const FeatureLayout& layout, const Eigen::Vector4d& x, double u,
                         const Eigen::VectorXd& p) {
  check_layout(layout, p);
  Eigen::VectorXd phi(layout.n_w());
  features_into(layout, x, u, p, phi.data());
  return phi;
}

Eigen::MatrixXd weights_to_matrix(const FeatureLayout& layout, const Eigen::VectorXd& w) {
  const int nz = layout.n_z();
  if (w.size() != layout.n_w()) {
    throw std::invalid_argument("weights_to_matrix: weight vector has wrong length");
  }
  Eigen::MatrixXd h(nz, nz);
  int idx = 0;
  for (int i = 0; i < nz; ++i) {
    for (int j = i; j < nz; ++j) {
      const double v = w[idx++];
      if (i == j) {
        h(i, i) = v;
      } else {
        h(i, j) = v / 2.0;
        h(j, i) = v / 2.0;
      }
    }
  }
  return h;
}

Eigen::VectorXd matrix_to_weights(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("matrix_to_weights: matrix must be square");
  }
  const int nz = static_cast<int>(h.rows());
  Eigen::VectorXd w(nz * (nz + 1) / 2);
  int idx = 0;
  for (int i = 0; i < nz; ++i) {
    for (int j = i; j < nz; ++j) {
      w[idx++] = (i == j) ? h(i, i) : 2.0 * h(i, j);
    }
  }
  return w;
}

double q_value(const FeatureLayout& layout, const Eigen::VectorXd& w, const Eigen::Vector4d& x,
               double u, const Eigen::VectorXd& p) {
  if (w.size() != layout.n_w()) {
    throw std::invalid_argument("q_value: weight vector has wrong length");
  }
  return w.dot(features(layout, x, u, p));
}

GainMatrix GainMatrix::zero(const FeatureLayout& layout) {
  GainMatrix g;
  g.coeffs = Eigen::RowVectorXd::Zero(layout.gain_size());
  g.n_p = layout.n_p;
  g.offset_term = layout.offset_term;
  return g;
}

GainMatrix greedy_gain(const FeatureLayout& layout, const Eigen::MatrixXd& h) {
  if (h.rows() != layout.n_z() || h.cols() != layout.n_z()) {
    throw std::invalid_argument("greedy_gain: H dimension does not match layout");
  }
  const double h_uu = h(0, 0);
  if (!(h_uu > kConvexityThreshold)) {
    throw NonConvexInControl("greedy_gain: h_uu <= 1e-10, Q is not convex in the control");
  }
  GainMatrix g;
  g.n_p = layout.n_p;
  g.offset_term = layout.offset_term;
  g.coeffs = h.row(0).tail(layout.gain_size()) / h_uu;
  return g;
}

double policy_apply(const GainMatrix& gain, const Eigen::Vector4d& x, const Eigen::VectorXd& p) {
  if (p.size() != gain.n_p) {
    throw std::invalid_argument("policy_apply: parameter vector has wrong dimension");
  }
  return -(gain.lx().dot(x) + gain.lref().dot(p) + gain.loff());
}

}  // namespace adptrack
