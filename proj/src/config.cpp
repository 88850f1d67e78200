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

#include "adptrack/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "adptrack/errors.hpp"

namespace adptrack {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + value);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad boolean value for '" + key + "': " + value);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("config: empty list element for '" + key + "'");
    }
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) {
    throw ConfigError("config: empty list for '" + key + "'");
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto d = [](double ExperimentConfig::* f) {
    return Setter([f](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*f = parse_double(k, v);
    });
  };
  auto i = [](int ExperimentConfig::* f) {
    return Setter([f](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*f = static_cast<int>(parse_long(k, v));
    });
  };
  auto l = [](long ExperimentConfig::* f) {
    return Setter([f](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*f = parse_long(k, v);
    });
  };
  auto b = [](bool ExperimentConfig::* f) {
    return Setter([f](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.*f = parse_bool(k, v);
    });
  };
  auto v = [](std::vector<double> ExperimentConfig::* f) {
    return Setter([f](ExperimentConfig& c, const std::string& k, const std::string& val) {
      c.*f = parse_list(k, val);
    });
  };
  auto s = [](std::string ExperimentConfig::* f) {
    return Setter([f](ExperimentConfig& c, const std::string&, const std::string& val) {
      c.*f = val;
    });
  };
  static const std::map<std::string, Setter> table{
      {"dt", d(&ExperimentConfig::dt)},
      {"gravity", d(&ExperimentConfig::gravity)},
      {"k_ball", d(&ExperimentConfig::k_ball)},
      {"c_u", d(&ExperimentConfig::c_u)},
      {"disturbance", d(&ExperimentConfig::disturbance)},
      {"noise_sigma", d(&ExperimentConfig::noise_sigma)},
      {"exc_duration", d(&ExperimentConfig::exc_duration)},
      {"exc_noise_amp", d(&ExperimentConfig::exc_noise_amp)},
      {"exc_bound", d(&ExperimentConfig::exc_bound)},
      {"exc_trim", d(&ExperimentConfig::exc_trim)},
      {"exc_sine_amps", v(&ExperimentConfig::exc_sine_amps)},
      {"exc_sine_freqs", v(&ExperimentConfig::exc_sine_freqs)},
      {"train_ref_amps", v(&ExperimentConfig::train_ref_amps)},
      {"train_ref_freqs", v(&ExperimentConfig::train_ref_freqs)},
      {"n_p", i(&ExperimentConfig::n_p)},
      {"beta", d(&ExperimentConfig::beta)},
      {"h_r", i(&ExperimentConfig::h_r)},
      {"gamma", d(&ExperimentConfig::gamma)},
      {"q_diag", v(&ExperimentConfig::q_diag)},
      {"r_cost", d(&ExperimentConfig::r_cost)},
      {"eps", d(&ExperimentConfig::eps)},
      {"max_iter", i(&ExperimentConfig::max_iter)},
      {"ridge", d(&ExperimentConfig::ridge)},
      {"v_n", d(&ExperimentConfig::v_n)},
      {"smooth_window", i(&ExperimentConfig::smooth_window)},
      {"n_tuples", l(&ExperimentConfig::n_tuples)},
      {"offset_term", b(&ExperimentConfig::offset_term)},
      {"threads", i(&ExperimentConfig::threads)},
      {"ref_kind", s(&ExperimentConfig::ref_kind)},
      {"ref_amplitude", d(&ExperimentConfig::ref_amplitude)},
      {"ref_period", d(&ExperimentConfig::ref_period)},
      {"val_duration", d(&ExperimentConfig::val_duration)},
      {"rect_width", d(&ExperimentConfig::rect_width)},
      {"rect_height", d(&ExperimentConfig::rect_height)},
      {"repetitions", i(&ExperimentConfig::repetitions)},
      {"seed",
       Setter([](ExperimentConfig& c, const std::string& k, const std::string& val) {
         try {
           std::size_t pos = 0;
           c.seed = std::stoull(val, &pos);
           if (pos != val.size()) throw std::invalid_argument("trailing characters");
         } catch (const std::exception&) {
           throw ConfigError("config: bad integer value for '" + k + "': " + val);
         }
       })},
      {"data_csv", s(&ExperimentConfig::data_csv)},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, bool> seen;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (seen[key]) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    seen[key] = true;
    it->second(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "# plant\n";
  out << "dt = " << fmt(c.dt) << "\n";
  out << "gravity = " << fmt(c.gravity) << "\n";
  out << "k_ball = " << fmt(c.k_ball) << "\n";
  out << "c_u = " << fmt(c.c_u) << "\n";
  out << "disturbance = " << fmt(c.disturbance) << "\n";
  out << "noise_sigma = " << fmt(c.noise_sigma) << "\n";
  out << "\n# excitation\n";
  out << "exc_duration = " << fmt(c.exc_duration) << "\n";
  out << "exc_noise_amp = " << fmt(c.exc_noise_amp) << "\n";
  out << "exc_bound = " << fmt(c.exc_bound) << "\n";
  out << "exc_trim = " << fmt(c.exc_trim) << "\n";
  out << "exc_sine_amps = " << fmt(c.exc_sine_amps) << "\n";
  out << "exc_sine_freqs = " << fmt(c.exc_sine_freqs) << "\n";
  out << "\n# training reference\n";
  out << "train_ref_amps = " << fmt(c.train_ref_amps) << "\n";
  out << "train_ref_freqs = " << fmt(c.train_ref_freqs) << "\n";
  out << "\n# reference approximation\n";
  out << "n_p = " << c.n_p << "\n";
  out << "beta = " << fmt(c.beta) << "\n";
  out << "h_r = " << c.h_r << "\n";
  out << "\n# training\n";
  out << "gamma = " << fmt(c.gamma) << "\n";
  out << "q_diag = " << fmt(c.q_diag) << "\n";
  out << "r_cost = " << fmt(c.r_cost) << "\n";
  out << "eps = " << fmt(c.eps) << "\n";
  out << "max_iter = " << c.max_iter << "\n";
  out << "ridge = " << fmt(c.ridge) << "\n";
  out << "v_n = " << fmt(c.v_n) << "\n";
  out << "smooth_window = " << c.smooth_window << "\n";
  out << "n_tuples = " << c.n_tuples << "\n";
  out << "offset_term = " << (c.offset_term ? "true" : "false") << "\n";
  out << "threads = " << c.threads << "\n";
  out << "\n# validation\n";
  out << "ref_kind = " << c.ref_kind << "\n";
  out << "ref_amplitude = " << fmt(c.ref_amplitude) << "\n";
  out << "ref_period = " << fmt(c.ref_period) << "\n";
  out << "val_duration = " << fmt(c.val_duration) << "\n";
  out << "rect_width = " << fmt(c.rect_width) << "\n";
  out << "rect_height = " << fmt(c.rect_height) << "\n";
  out << "repetitions = " << c.repetitions << "\n";
  out << "\nseed = " << c.seed << "\n";
  out << "data_csv = " << c.data_csv << "\n";
  return out.str();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("config: cannot write " + path);
  }
  out << serialize_config(cfg);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(c.dt > 0.0, "dt must be positive");
  require(c.n_p == 1 || c.n_p == 3, "n_p must be 1 or 3");
  require(c.beta > 0.0 && c.beta <= 1.0, "beta must lie in (0, 1]");
  require(c.h_r >= c.n_p, "h_r must be at least n_p");
  require(c.gamma > 0.0 && c.gamma < 1.0, "gamma must lie in (0, 1)");
  require(c.q_diag.size() == 4, "q_diag must have 4 entries");
  for (double q : c.q_diag) require(q >= 0.0, "q_diag entries must be nonnegative");
  require(c.r_cost > 0.0, "r_cost must be positive");
  require(c.eps > 0.0, "eps must be positive");
  require(c.max_iter >= 1, "max_iter must be at least 1");
  require(c.ridge >= 0.0, "ridge must be nonnegative");
  require(c.v_n > 0.0, "v_n must be positive");
  require(c.smooth_window >= 1, "smooth_window must be at least 1");
  require(c.n_tuples >= 1, "n_tuples must be positive");
  require(c.threads >= 1, "threads must be at least 1");
  require(c.repetitions >= 1, "repetitions must be at least 1");
  require(c.ref_kind == "sine-step" || c.ref_kind == "composite" ||
              c.ref_kind == "rectangle-2d" || c.ref_kind == "training",
          "ref_kind must be sine-step, composite, rectangle-2d or training");
  require(std::abs(c.ref_amplitude) <= 0.5, "ref_amplitude exceeds plate half-width");
  require(c.ref_period > 0.0, "ref_period must be positive");
  require(c.val_duration > 0.0, "val_duration must be positive");
  require(c.exc_duration > 0.0, "exc_duration must be positive");
  require(c.exc_sine_amps.size() == c.exc_sine_freqs.size(),
          "exc_sine_amps and exc_sine_freqs must have equal length");
  require(c.train_ref_amps.size() == c.train_ref_freqs.size(),
          "train_ref_amps and train_ref_freqs must have equal length");
  require(static_cast<double>(c.n_tuples) * c.dt <= c.exc_duration,
          "exc_duration too short for n_tuples");
}

}  // namespace adptrack
