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

#include <stdexcept>
#include <string>

namespace adptrack {

/// Weighted LS regression matrix is rank deficient (window too short or
/// degenerate basis).
struct RankDeficientFit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The estimated Q-function is not convex in the control (h_uu below the
/// positive threshold); usually indicates a diverged evaluation step.
struct NonConvexInControl : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The LSTDQ fixed-point system is singular even after regularization.
struct SingularEvaluation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values encountered during accumulation or solving.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap before meeting tolerance.
struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The simulated ball left the plate surface.
struct EdgeContact : std::runtime_error {
  EdgeContact(const std::string& what, long step) : std::runtime_error(what), step_index(step) {}
  long step_index;
};

/// Malformed or unknown key in an experiment configuration file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace adptrack
