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
#include <utility>
#include <vector>

// Local polynomial approximation of a desired ball trajectory. A window of
// the reference is fitted with a weighted least-squares regression onto the
// monomial basis rho(i) = [(i*dt)^2, i*dt, 1]^T (or [1] for the setpoint
// case); parameter vectors are ordered highest degree first, [p2 p1 p0].
// Parameters propagate in time through the shift matrix T(i), which satisfies
// p^T T(i) rho(j) = p^T rho(i+j).

namespace adptrack {

inline constexpr double kPlateHalfWidth = 0.5;  // m

struct BasisSpec {
  int n_p = 3;       // basis dimension: 3 (quadratic) or 1 (setpoint)
  double dt = 0.04;  // sampling time, s
};

using RefParams = Eigen::VectorXd;

struct FitConfig {
  double beta = 0.8;  // fit discount in (0, 1]
  int horizon = 10;   // window length h_r, >= n_p
};

/// Sampled desired ball positions at a fixed sampling time. Queries past the
/// end hold the last sample, so any window of length h is always defined.
struct ReferenceSignal {
  double dt = 0.04;
  std::vector<double> samples;

  double at(long i) const;
  Eigen::VectorXd window(long start, int length) const;
  long size() const { return static_cast<long>(samples.size()); }
};

/// rho(i); [ (i*dt)^2, i*dt, 1 ] for n_p = 3, [1] for n_p = 1.
Eigen::VectorXd eval_basis(const BasisSpec& spec, long i);

/// p^T rho(i): the approximated reference i steps ahead.
double eval_ref(const RefParams& p, const BasisSpec& spec, long i);

/// T(i) with p^T T(i) rho(j) = p^T rho(i+j); T(0) = I and T(i)T(j) = T(i+j).
Eigen::MatrixXd shift_matrix(const BasisSpec& spec, long i);

/// Weighted LS fit of a reference window, weights diag(1, beta, ...,
/// beta^(h-1)). Solved by column-pivoted QR on the weighted design matrix.
/// Throws RankDeficientFit when the design matrix loses rank.
RefParams fit_params(const Eigen::Ref<const Eigen::VectorXd>& window, const FitConfig& cfg,
                     const BasisSpec& spec);

/// p^(i) with (p^(i))^T = p^T T(i).
RefParams propagate_params(const RefParams& p, const BasisSpec& spec, long i);

// Reference generators. All enforce |r| <= kPlateHalfWidth and sample at dt.

/// Alternating plateaus at +-amplitude joined by smooth sine transitions
/// (a clipped, steepened sine with the given period).
ReferenceSignal make_sine_step(double amplitude, double period, double duration, double dt);

/// Superposition of sines, a square step component and a triangular ramp.
ReferenceSignal make_validation_composite(double duration, double dt);

/// Sum of sinusoids amps[j] * sin(2*pi*freqs[j]*t); used to excite the
/// reference parameters during training.
ReferenceSignal make_training_reference(const std::vector<double>& amps,
                                        const std::vector<double>& freqs, double duration,
                                        double dt);

/// Constant-speed walk around the perimeter of an axis-aligned rectangle
/// centered on the plate; returns the (x, y) component signals.
std::pair<ReferenceSignal, ReferenceSignal> make_rectangle_2d(double width, double height,
                                                              double period, double duration,
                                                              double dt);

/// CSV export, columns `k, t, r` (or `k, t, rx, ry`), with header row.
void write_reference_csv(const std::string& path, const ReferenceSignal& sig);
void write_reference_csv_2d(const std::string& path, const ReferenceSignal& x,
                            const ReferenceSignal& y);

}  // namespace adptrack
