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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "adptrack/errors.hpp"
#include "adptrack/pipeline.hpp"

using namespace adptrack;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Small but otherwise faithful training setup to keep the suite quick.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_tuples = 400;
  cfg.exc_duration = 20.0;
  cfg.smooth_window = 1;
  cfg.val_duration = 8.0;
  cfg.repetitions = 2;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("config round-trips losslessly") {
  ExperimentConfig cfg;
  cfg.gamma = 0.87;
  cfg.q_diag = {801.5, 0.25, 399.0, 1e-3};
  cfg.exc_sine_freqs = {0.31, 0.72, 1.33};
  cfg.exc_sine_amps = {0.41, 0.72, 0.93};
  cfg.seed = 982374652;
  cfg.ref_kind = "composite";
  cfg.offset_term = false;
  cfg.data_csv = "somewhere/data.csv";
  const ExperimentConfig back = parse_config(serialize_config(cfg));
  CHECK(back == cfg);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(parse_config("not_a_key = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = 0.9\ngamma = 0.8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma 0.9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_p = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("ref_kind = circle\n"), ConfigError);

  const ExperimentConfig cfg = parse_config("# comment only\n\ngamma = 0.85 # inline\n");
  CHECK(cfg.gamma == 0.85);
}

TEST_CASE("assembled tuples satisfy the propagation invariant") {
  const ExperimentConfig cfg = small_config();
  const CollectedData data = collect_data(excitation_config(cfg), plant_params(cfg));
  const ReferenceSignal ref = make_training_reference(
      cfg.train_ref_amps, cfg.train_ref_freqs,
      static_cast<double>(cfg.n_tuples + cfg.h_r + 1) * cfg.dt, cfg.dt);
  const auto tuples = assemble_tuples(cfg, data, ref);
  REQUIRE(static_cast<long>(tuples.size()) == cfg.n_tuples);

  const BasisSpec spec = basis_spec(cfg);
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    const Eigen::VectorXd expected = propagate_params(tuples[k].p, spec, 1);
    CHECK((tuples[k].p_next - expected).cwiseAbs().maxCoeff() == 0.0);
    if (k + 1 < tuples.size()) {
      CHECK(tuples[k].x_next == tuples[k + 1].x);
    }
  }
}

TEST_CASE("gain JSON round-trips") {
  TempDir dir("adptrack_gainio");
  GainFile file;
  file.n_p = 3;
  file.normalized = true;
  file.w = Eigen::VectorXd::LinSpaced(45, -3.0, 4.0);
  file.gain.n_p = 3;
  file.gain.offset_term = true;
  file.gain.coeffs = Eigen::RowVectorXd::LinSpaced(8, -2.0, 2.0);

  const std::string path = dir.str() + "/gain.json";
  save_gain_json(path, file);
  const GainFile back = load_gain_json(path);
  CHECK(back.n_p == file.n_p);
  CHECK(back.normalized == file.normalized);
  CHECK(back.w == file.w);
  CHECK(back.gain.coeffs == file.gain.coeffs);
  CHECK(back.gain.offset_term);

  // Offset-free gains come back with the shorter row.
  file.gain.offset_term = false;
  file.gain.coeffs = Eigen::RowVectorXd::LinSpaced(7, -2.0, 2.0);
  file.w = Eigen::VectorXd::LinSpaced(36, -3.0, 4.0);
  save_gain_json(path, file);
  const GainFile shorter = load_gain_json(path);
  CHECK(!shorter.gain.offset_term);
  CHECK(shorter.gain.loff() == 0.0);
}

TEST_CASE("zero reference keeps the ball at rest") {
  ExperimentConfig cfg = small_config();
  cfg.ref_amplitude = 0.0;
  const GainMatrix gain = model_based_gain(cfg).gain;
  const Rollout r = rollout(gain, make_reference(cfg), cfg, cfg.seed);
  CHECK(!r.edge_contact);
  for (const auto& x : r.states) {
    CHECK(x.isZero(0.0));
  }
  CHECK(r.cost_curve.back() == 0.0);
}

TEST_CASE("training artifacts are byte-reproducible") {
  const ExperimentConfig cfg = small_config();
  TempDir dir_a("adptrack_det_a");
  TempDir dir_b("adptrack_det_b");
  const TrainArtifacts a = run_train(cfg, dir_a.str());
  const TrainArtifacts b = run_train(cfg, dir_b.str());
  CHECK(a.trace.converged);
  CHECK(slurp(a.gain_path) == slurp(b.gain_path));
  CHECK(slurp(a.trace_path) == slurp(b.trace_path));
}

TEST_CASE("externally recorded data feeds the same training path") {
  const ExperimentConfig cfg = small_config();
  TempDir dir("adptrack_import");

  const std::string data_path = run_collect(cfg, dir.str());
  ExperimentConfig cfg_import = cfg;
  cfg_import.data_csv = data_path;

  const TrainArtifacts direct = run_train(cfg, dir.str(), "direct");
  const TrainArtifacts imported = run_train(cfg_import, dir.str(), "imported");
  CHECK((direct.gain.coeffs - imported.gain.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validation writes per-repetition and mean files") {
  ExperimentConfig cfg = small_config();
  cfg.noise_sigma = 1e-4;
  TempDir dir("adptrack_val");

  const TrainArtifacts art = run_train(cfg, dir.str());
  const auto results = run_validate(cfg, {art.gain_path}, dir.str());
  REQUIRE(results.size() == 1);
  CHECK(results[0].repetitions.size() == 2);
  for (const auto& path : results[0].csv_paths) {
    CHECK(fs::exists(path));
  }
  CHECK(results[0].final_cost_mean > 0.0);
  CHECK(fs::exists(dir.path / "plot.py"));

  // Repetitions differ through measurement noise but merge deterministically.
  const auto again = run_validate(cfg, {art.gain_path}, dir.str());
  CHECK(again[0].final_cost_mean == results[0].final_cost_mean);
}

TEST_CASE("compare pipeline reports a small gain gap") {
  ExperimentConfig cfg = small_config();
  cfg.n_tuples = 600;
  cfg.exc_duration = 30.0;
  TempDir dir("adptrack_cmp");
  const CompareReport report = run_compare(cfg, dir.str());
  CHECK(report.converged);
  CHECK(report.max_rel_gain_diff < 1e-2);
  CHECK(fs::exists(report.report_path));
  CHECK(report.learned_final_cost > 0.0);
  CHECK(report.model_final_cost > 0.0);
}

TEST_CASE("rect2d trains two axes and writes rollouts") {
  ExperimentConfig cfg = small_config();
  cfg.ref_kind = "rectangle-2d";
  cfg.val_duration = 12.0;
  cfg.ref_period = 12.0;
  cfg.repetitions = 1;
  TempDir dir("adptrack_rect");
  const Rect2dArtifacts art = run_rect2d(cfg, {}, dir.str());
  CHECK(art.trained);
  REQUIRE(art.csv_paths.size() == 1);
  std::ifstream in(art.csv_paths[0]);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,t,rx,ry,sx,sy,ux,uy,cost_acc_x,cost_acc_y");

  CHECK_THROWS_AS(run_rect2d(cfg, {"one.json"}, dir.str()), std::invalid_argument);
}

#ifdef ADPTRACK_BIN
TEST_CASE("command line smoke") {
  TempDir dir("adptrack_cli");
  const std::string bin = ADPTRACK_BIN;
  const std::string cfg_path = dir.str() + "/exp.cfg";
  save_config(cfg_path, small_config());

  std::string cmd = bin + " train --config " + cfg_path + " --out " + dir.str() + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir.path / "gain.json"));

  cmd = bin + " validate --config " + cfg_path + " --gain " + (dir.path / "gain.json").string() +
        " --out " + dir.str() + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);

  // Exit code 2 when the iteration cap prevents convergence.
  ExperimentConfig capped = small_config();
  capped.max_iter = 1;
  const std::string capped_path = dir.str() + "/capped.cfg";
  save_config(capped_path, capped);
  cmd = bin + " train --config " + capped_path + " --out " + dir.str() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 2);

  // Unknown config keys are rejected up front.
  const std::string bad_path = dir.str() + "/bad.cfg";
  {
    std::ofstream out(bad_path);
    out << "gama = 0.9\n";
  }
  cmd = bin + " train --config " + bad_path + " --out " + dir.str() + " 2> /dev/null";
  const int bad_status = std::system(cmd.c_str());
  CHECK(WIFEXITED(bad_status));
  CHECK(WEXITSTATUS(bad_status) == 1);
}
#endif
