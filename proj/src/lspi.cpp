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

#include "adptrack/lspi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "adptrack/errors.hpp"
#include "adptrack/kernels.hpp"

namespace adptrack {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_inputs(const std::vector<DataTuple>& tuples, const TrainConfig& cfg,
                  const FeatureLayout& layout) {
  if (tuples.empty()) {
    throw std::invalid_argument("lstdq_evaluate: empty tuple batch");
  }
  if (!(cfg.gamma >= 0.0) || cfg.gamma >= 1.0) {
    throw std::invalid_argument("TrainConfig: gamma must lie in [0, 1)");
  }
  if (!(cfg.r_cost > 0.0)) {
    throw std::invalid_argument("TrainConfig: R must be positive");
  }
  if (cfg.ridge < 0.0) {
    throw std::invalid_argument("TrainConfig: ridge must be nonnegative");
  }
  for (const auto& t : tuples) {
    if (t.p.size() != layout.n_p || t.p_next.size() != layout.n_p) {
      throw std::invalid_argument("DataTuple: parameter dimension does not match layout");
    }
  }
}

struct Accumulator {
  std::vector<double> m;  // row-major n_w x n_w
  std::vector<double> b;
};

void accumulate_range(const std::vector<DataTuple>& tuples, std::size_t begin, std::size_t end,
                      const GainMatrix& gain, const TrainConfig& cfg, const FeatureLayout& layout,
                      const BasisSpec& spec, Accumulator& acc) {
  const std::size_t nw = static_cast<std::size_t>(layout.n_w());
  acc.m.assign(nw * nw, 0.0);
  acc.b.assign(nw, 0.0);
  std::vector<double> phi(nw), phi_next(nw), diff(nw);
  Eigen::VectorXd p_work;
  for (std::size_t k = begin; k < end; ++k) {
    const DataTuple& t = tuples[k];
    features_into(layout, t.x, t.u, t.p, phi.data());
    const double u_next = policy_apply(gain, t.x_next, t.p_next);
    features_into(layout, t.x_next, u_next, t.p_next, phi_next.data());
    std::copy(phi.begin(), phi.end(), diff.begin());
    kernels::axpy(-cfg.gamma, phi_next.data(), diff.data(), nw);
    kernels::rank1_update(acc.m.data(), phi.data(), diff.data(), nw);
    const double cost = stage_cost(t.x, t.u, eval_ref(t.p, spec, 0), cfg);
    kernels::axpy(cost, phi.data(), acc.b.data(), nw);
  }
}

}  // namespace

double stage_cost(const Eigen::Vector4d& x, double u, double r0, const TrainConfig& cfg) {
  Eigen::Vector4d e = x;
  e[0] -= r0;
  return e.dot(cfg.q_mat * e) + u * cfg.r_cost * u;
}

Eigen::VectorXd lstdq_evaluate(const std::vector<DataTuple>& tuples, const GainMatrix& gain,
                               const TrainConfig& cfg, const FeatureLayout& layout,
                               const BasisSpec& spec) {
  check_inputs(tuples, cfg, layout);
  const std::size_t nw = static_cast<std::size_t>(layout.n_w());

  const int threads = std::max(1, cfg.threads);
  std::vector<Accumulator> parts(static_cast<std::size_t>(threads));
  if (threads == 1) {
    accumulate_range(tuples, 0, tuples.size(), gain, cfg, layout, spec, parts[0]);
  } else {
    // Fixed chunk boundaries merged in index order keep the reduction
    // deterministic for a given thread count.
    std::vector<std::thread> pool;
    const std::size_t chunk = (tuples.size() + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    for (int i = 0; i < threads; ++i) {
      const std::size_t begin = std::min(tuples.size(), static_cast<std::size_t>(i) * chunk);
      const std::size_t end = std::min(tuples.size(), begin + chunk);
      pool.emplace_back([&, i, begin, end] {
        accumulate_range(tuples, begin, end, gain, cfg, layout, spec, parts[static_cast<std::size_t>(i)]);
      });
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  RowMajorMatrix m = RowMajorMatrix::Zero(layout.n_w(), layout.n_w());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(layout.n_w());
  for (const auto& part : parts) {
    m += Eigen::Map<const RowMajorMatrix>(part.m.data(), layout.n_w(), layout.n_w());
    b += Eigen::Map<const Eigen::VectorXd>(part.b.data(), layout.n_w());
  }
  m.diagonal().array() += cfg.ridge;

  if (!m.allFinite() || !b.allFinite()) {
    throw NumericalFailure("lstdq_evaluate: non-finite accumulation");
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    throw SingularEvaluation("lstdq_evaluate: fixed-point system is singular");
  }
  Eigen::VectorXd w = lu.solve(b);
  // Two rounds of iterative refinement; the weight deltas chased by the
  // stopping criterion sit near the raw solver noise floor otherwise.
  for (int r = 0; r < 2; ++r) {
    w += lu.solve(b - m * w);
  }
  if (!w.allFinite()) {
    throw NumericalFailure("lstdq_evaluate: non-finite solution");
  }
  return w;
}

TrainResult policy_iterate(const std::vector<DataTuple>& tuples, const TrainConfig& cfg,
                           const FeatureLayout& layout, const BasisSpec& spec) {
  check_inputs(tuples, cfg, layout);
  if (!(cfg.eps > 0.0)) {
    throw std::invalid_argument("TrainConfig: eps must be positive");
  }

  Eigen::VectorXd w_prev = Eigen::VectorXd::Ones(layout.n_w());
  GainMatrix gain;
  try {
    gain = greedy_gain(layout, weights_to_matrix(layout, w_prev));
  } catch (const NonConvexInControl&) {
    gain = GainMatrix::zero(layout);
  }

  TrainResult result;
  for (int l = 1; l <= cfg.max_iter; ++l) {
    Eigen::VectorXd w;
    try {
      w = lstdq_evaluate(tuples, gain, cfg, layout, spec);
      gain = greedy_gain(layout, weights_to_matrix(layout, w));
    } catch (const NonConvexInControl& e) {
      throw NonConvexInControl(std::string(e.what()) + " at iteration " + std::to_string(l));
    } catch (const SingularEvaluation& e) {
      throw SingularEvaluation(std::string(e.what()) + " at iteration " + std::to_string(l));
    }
    const double delta = (w - w_prev).norm();
    result.trace.weights.push_back(w);
    result.trace.deltas.push_back(delta);
    result.trace.iterations = l;
    w_prev = w;
    if (delta <= cfg.eps) {
      result.trace.converged = true;
      break;
    }
  }
  result.weights = w_prev;
  result.gain = gain;
  return result;
}

std::vector<DataTuple> normalize(const std::vector<DataTuple>& tuples, double v_n) {
  if (!(v_n > 0.0)) {
    throw std::invalid_argument("normalize: v_n must be positive");
  }
  std::vector<DataTuple> out = tuples;
  for (auto& t : out) {
    t.x *= v_n;
    t.x_next *= v_n;
    t.p *= v_n;
    t.p_next *= v_n;
  }
  return out;
}

GainMatrix renormalize_gain(const GainMatrix& gain, double v_n) {
  if (!(v_n > 0.0)) {
    throw std::invalid_argument("renormalize_gain: v_n must be positive");
  }
  GainMatrix out = gain;
  out.coeffs.head(kStateDim + gain.n_p) *= v_n;
  return out;
}

std::vector<double> accumulated_cost(const std::vector<Eigen::Vector4d>& states,
                                     const std::vector<double>& controls,
                                     const std::vector<Eigen::VectorXd>& refs_p,
                                     const TrainConfig& cfg, const BasisSpec& spec) {
  if (states.size() != controls.size() || states.size() != refs_p.size()) {
    throw std::invalid_argument("accumulated_cost: input lengths differ");
  }
  std::vector<double> curve(states.size());
  double total = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    total += stage_cost(states[k], controls[k], eval_ref(refs_p[k], spec, 0), cfg);
    curve[k] = total;
  }
  return curve;
}

BellmanResidual bellman_residual(const std::vector<DataTuple>& tuples, const Eigen::VectorXd& w,
                                 const GainMatrix& gain, const TrainConfig& cfg,
                                 const FeatureLayout& layout, const BasisSpec& spec) {
  check_inputs(tuples, cfg, layout);
  BellmanResidual res;
  for (const auto& t : tuples) {
    const double q = q_value(layout, w, t.x, t.u, t.p);
    const double u_next = policy_apply(gain, t.x_next, t.p_next);
    const double q_next = q_value(layout, w, t.x_next, u_next, t.p_next);
    const double cost = stage_cost(t.x, t.u, eval_ref(t.p, spec, 0), cfg);
    res.mean_abs_residual += std::abs(q - cost - cfg.gamma * q_next);
    res.mean_abs_cost += std::abs(cost);
  }
  res.mean_abs_residual /= static_cast<double>(tuples.size());
  res.mean_abs_cost /= static_cast<double>(tuples.size());
  return res;
}

void write_trace_csv(const std::string& path, const TrainingTrace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_trace_csv: cannot open " + path);
  }
  const long nw = trace.weights.empty() ? 0 : static_cast<long>(trace.weights.front().size());
  out << "iter,delta";
  for (long i = 0; i < nw; ++i) {
    out << ",w_" << i;
  }
  out << '\n';
  char buf[32];
  for (std::size_t l = 0; l < trace.weights.size(); ++l) {
    std::snprintf(buf, sizeof(buf), "%.17g", trace.deltas[l]);
    out << (l + 1) << ',' << buf;
    for (long i = 0; i < nw; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", trace.weights[l][i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace adptrack
