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

#include "adptrack/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "adptrack/errors.hpp"

namespace adptrack {

namespace {

void check_spec(const BasisSpec& spec) {
  if (spec.n_p != 1 && spec.n_p != 3) {
    throw std::invalid_argument("BasisSpec: n_p must be 1 or 3");
  }
  if (!(spec.dt > 0.0)) {
    throw std::invalid_argument("BasisSpec: dt must be positive");
  }
}

void check_amplitude(double amp) {
  if (std::abs(amp) > kPlateHalfWidth) {
    throw std::invalid_argument("reference amplitude exceeds plate half-width");
  }
}

ReferenceSignal sample_signal(double duration, double dt, auto&& fn) {
  if (!(duration > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("reference generator: duration and dt must be positive");
  }
  ReferenceSignal sig;
  sig.dt = dt;
  const long n = static_cast<long>(std::llround(duration / dt)) + 1;
  sig.samples.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    sig.samples.push_back(fn(static_cast<double>(k) * dt));
  }
  return sig;
}

}  // namespace

double ReferenceSignal::at(long i) const {
  if (samples.empty()) {
    throw std::invalid_argument("ReferenceSignal::at: empty signal");
  }
  if (i < 0) {
    throw std::invalid_argument("ReferenceSignal::at: negative index");
  }
  const long n = size();
  return samples[static_cast<std::size_t>(std::min(i, n - 1))];
}

Eigen::VectorXd ReferenceSignal::window(long start, int length) const {
  Eigen::VectorXd w(length);
  for (int j = 0; j < length; ++j) {
    w[j] = at(start + j);
  }
  return w;
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, long i) {
  check_spec(spec);
  if (i < 0) {
    throw std::invalid_argument("eval_basis: negative step index");
  }
  if (spec.n_p == 1) {
    return Eigen::VectorXd::Ones(1);
  }
  const double tau = static_cast<double>(i) * spec.dt;
  Eigen::VectorXd rho(3);
  rho << tau * tau, tau, 1.0;
  return rho;
}

double eval_ref(const RefParams& p, const BasisSpec& spec, long i) {
  if (p.size() != spec.n_p) {
    throw std::invalid_argument("eval_ref: parameter dimension does not match basis");
  }
  return p.dot(eval_basis(spec, i));
}

Eigen::MatrixXd shift_matrix(const BasisSpec& spec, long i) {
  check_spec(spec);
  if (i < 0) {
    throw std::invalid_argument("shift_matrix: negative step index");
  }
  if (spec.n_p == 1) {
    return Eigen::MatrixXd::Ones(1, 1);
  }
  const double tau = static_cast<double>(i) * spec.dt;
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(3, 3);
  t(0, 1) = 2.0 * tau;
  t(0, 2) = tau * tau;
  t(1, 2) = tau;
  return t;
}

RefParams fit_params(const Eigen::Ref<const Eigen::VectorXd>& window, const FitConfig& cfg,
                     const BasisSpec& spec) {
  check_spec(spec);
  const int h = cfg.horizon;
  if (window.size() != h) {
    throw std::invalid_argument("fit_params: window length must equal the fit horizon");
  }
  if (h < spec.n_p) {
    throw RankDeficientFit("fit_params: horizon shorter than basis dimension");
  }
  if (!(cfg.beta > 0.0) || cfg.beta > 1.0) {
    throw std::invalid_argument("fit_params: beta must lie in (0, 1]");
  }

  // Solve min_p || sqrt(W) (P p - r) || with W = diag(1, beta, ...) instead
  // of forming the normal equations of the closed-form expression.
  Eigen::MatrixXd design(h, spec.n_p);
  Eigen::VectorXd rhs(h);
  double w = 1.0;
  for (int i = 0; i < h; ++i) {
    const double sw = std::sqrt(w);
    design.row(i) = sw * eval_basis(spec, i).transpose();
    rhs[i] = sw * window[i];
    w *= cfg.beta;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < spec.n_p) {
    throw RankDeficientFit("fit_params: weighted design matrix is rank deficient");
  }
  return qr.solve(rhs);
}

RefParams propagate_params(const RefParams& p, const BasisSpec& spec, long i) {
  if (p.size() != spec.n_p) {
    throw std::invalid_argument("propagate_params: parameter dimension does not match basis");
  }
  return shift_matrix(spec, i).transpose() * p;
}

ReferenceSignal make_sine_step(double amplitude, double period, double duration, double dt) {
  check_amplitude(amplitude);
  if (!(period > 0.0)) {
    throw std::invalid_argument("make_sine_step: period must be positive");
  }
  constexpr double steepness = 2.0;  // plateau fraction 2/3 of each cycle
  return sample_signal(duration, dt, [&](double t) {
    const double raw = steepness * std::sin(2.0 * std::numbers::pi * t / period);
    return amplitude * std::clamp(raw, -1.0, 1.0);
  });
}

ReferenceSignal make_validation_composite(double duration, double dt) {
  // Overlaid sine, square-step and triangular-ramp components, max 0.19 m.
  const double pi2 = 2.0 * std::numbers::pi;
  return sample_signal(duration, dt, [&](double t) {
    const double sine = 0.08 * std::sin(pi2 * 0.10 * t) + 0.02 * std::sin(pi2 * 0.35 * t);
    const double square = 0.05 * (std::sin(pi2 * 0.05 * t) >= 0.0 ? 1.0 : -1.0);
    const double phase = std::fmod(t * 0.0333, 1.0);
    const double tri = 0.04 * (4.0 * std::abs(phase - 0.5) - 1.0);
    return sine + square + tri;
  });
}

ReferenceSignal make_training_reference(const std::vector<double>& amps,
                                        const std::vector<double>& freqs, double duration,
                                        double dt) {
  if (amps.size() != freqs.size() || amps.empty()) {
    throw std::invalid_argument("make_training_reference: amps and freqs must match and be non-empty");
  }
  double total = 0.0;
  for (double a : amps) total += std::abs(a);
  check_amplitude(total);
  return sample_signal(duration, dt, [&](double t) {
    double r = 0.0;
    for (std::size_t j = 0; j < amps.size(); ++j) {
      r += amps[j] * std::sin(2.0 * std::numbers::pi * freqs[j] * t);
    }
    return r;
  });
}

std::pair<ReferenceSignal, ReferenceSignal> make_rectangle_2d(double width, double height,
                                                              double period, double duration,
                                                              double dt) {
  check_amplitude(width / 2.0);
  check_amplitude(height / 2.0);
  if (!(period > 0.0)) {
    throw std::invalid_argument("make_rectangle_2d: period must be positive");
  }
  const double perimeter = 2.0 * (width + height);
  // Corner fractions of the perimeter, starting at (-w/2, -h/2) going right.
  const double f1 = width / perimeter;
  const double f2 = (width + height) / perimeter;
  const double f3 = (2.0 * width + height) / perimeter;
  auto corner_pos = [&](double frac, int axis) {
    const double w2 = width / 2.0;
    const double h2 = height / 2.0;
    if (frac < f1) {  // bottom edge, left to right
      const double s = frac / f1;
      return axis == 0 ? -w2 + s * width : -h2;
    }
    if (frac < f2) {  // right edge, bottom to top
      const double s = (frac - f1) / (f2 - f1);
      return axis == 0 ? w2 : -h2 + s * height;
    }
    if (frac < f3) {  // top edge, right to left
      const double s = (frac - f2) / (f3 - f2);
      return axis == 0 ? w2 - s * width : h2;
    }
    const double s = (frac - f3) / (1.0 - f3);  // left edge, top to bottom
    return axis == 0 ? -w2 : h2 - s * height;
  };
  auto x = sample_signal(duration, dt,
                         [&](double t) { return corner_pos(std::fmod(t / period, 1.0), 0); });
  auto y = sample_signal(duration, dt,
                         [&](double t) { return corner_pos(std::fmod(t / period, 1.0), 1); });
  return {std::move(x), std::move(y)};
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_reference_csv(const std::string& path, const ReferenceSignal& sig) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_reference_csv: cannot open " + path);
  }
  out << "k,t,r\n";
  for (long k = 0; k < sig.size(); ++k) {
    out << k << ',' << format_double(static_cast<double>(k) * sig.dt) << ','
        << format_double(sig.samples[static_cast<std::size_t>(k)]) << '\n';
  }
}

void write_reference_csv_2d(const std::string& path, const ReferenceSignal& x,
                            const ReferenceSignal& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("write_reference_csv_2d: component lengths differ");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_reference_csv_2d: cannot open " + path);
  }
  out << "k,t,rx,ry\n";
  for (long k = 0; k < x.size(); ++k) {
    out << k << ',' << format_double(static_cast<double>(k) * x.dt) << ','
        << format_double(x.samples[static_cast<std::size_t>(k)]) << ','
        << format_double(y.samples[static_cast<std::size_t>(k)]) << '\n';
  }
}

}  // namespace adptrack
