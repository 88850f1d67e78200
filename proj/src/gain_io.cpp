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

#include "adptrack/gain_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace adptrack {

void save_gain_json(const std::string& path, const GainFile& file) {
  nlohmann::json j;
  j["n_p"] = file.n_p;
  j["normalized"] = file.normalized;
  j["w"] = std::vector<double>(file.w.data(), file.w.data() + file.w.size());
  j["L"] = std::vector<double>(file.gain.coeffs.data(),
                               file.gain.coeffs.data() + file.gain.coeffs.size());
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_gain_json: cannot open " + path);
  }
  out << j.dump(2) << '\n';
}

GainFile load_gain_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_gain_json: cannot open " + path);
  }
  nlohmann::json j;
  in >> j;

  GainFile file;
  file.n_p = j.at("n_p").get<int>();
  file.normalized = j.at("normalized").get<bool>();
  const auto w = j.at("w").get<std::vector<double>>();
  const auto l = j.at("L").get<std::vector<double>>();
  file.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<long>(w.size()));

  const long with_offset = 4 + file.n_p + 1;
  const long without_offset = 4 + file.n_p;
  if (static_cast<long>(l.size()) == with_offset) {
    file.gain.offset_term = true;
  } else if (static_cast<long>(l.size()) == without_offset) {
    file.gain.offset_term = false;
  } else {
    throw std::runtime_error("load_gain_json: L length inconsistent with n_p in " + path);
  }
  file.gain.n_p = file.n_p;
  file.gain.coeffs = Eigen::Map<const Eigen::RowVectorXd>(l.data(), static_cast<long>(l.size()));

  FeatureLayout layout{file.n_p, file.gain.offset_term};
  if (file.w.size() != 0 && file.w.size() != layout.n_w()) {
    throw std::runtime_error("load_gain_json: w length inconsistent with n_p in " + path);
  }
  return file;
}

}  // namespace adptrack
