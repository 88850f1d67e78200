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

#include "adptrack/qfunc.hpp"

// Trained controllers serialize to a JSON document with fields `n_p`,
// `normalized`, `w` and `L`. `w` holds the Q-function weights in the
// (normalized) training coordinates, `L` the re-normalized control row ready
// to act on physical states. Model-based gains use the same schema, so files
// can be diffed directly. Whether the constant slot is present follows from
// the length of `L` (4 + n_p entries without it, one more with it).

namespace adptrack {

struct GainFile {
  int n_p = 3;
  bool normalized = true;
  Eigen::VectorXd w;
  GainMatrix gain;
};

void save_gain_json(const std::string& path, const GainFile& file);
GainFile load_gain_json(const std::string& path);

}  // namespace adptrack
