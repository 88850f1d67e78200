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

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "adptrack/config.hpp"
#include "adptrack/errors.hpp"
#include "adptrack/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> gains;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_gains) {
  cmd->add_option("--config", args.config_path, "Experiment configuration file");
  cmd->add_option("--seed", args.seed, "Override the config seed");
  cmd->add_option("--out", args.out_dir, "Output directory");
  if (with_gains) {
    cmd->add_option("--gain", args.gains, "Gain JSON file (repeatable)");
  }
}

adptrack::ExperimentConfig resolve_config(const CommonArgs& args) {
  adptrack::ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = adptrack::load_config(args.config_path);
  }
  if (args.seed) {
    cfg.seed = *args.seed;
  }
  adptrack::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-free ADP trajectory tracking on a simulated ball-on-plate axis"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* collect = app.add_subcommand("collect", "Record excitation data to data.csv");
  add_common(collect, args, false);
  auto* train = app.add_subcommand("train", "Learn a tracking controller from excitation data");
  add_common(train, args, false);
  auto* validate_cmd =
      app.add_subcommand("validate", "Closed-loop rollouts of trained gains on a reference");
  add_common(validate_cmd, args, true);
  auto* compare =
      app.add_subcommand("compare", "Train and diff against the model-based controller");
  add_common(compare, args, false);
  auto* rect2d = app.add_subcommand("rect2d", "Track a rectangle with two axis controllers");
  add_common(rect2d, args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    const adptrack::ExperimentConfig cfg = resolve_config(args);

    if (collect->parsed()) {
      const auto path = adptrack::run_collect(cfg, args.out_dir);
      std::printf("wrote %s\n", path.c_str());
    } else if (train->parsed()) {
      const auto art = adptrack::run_train(cfg, args.out_dir);
      std::printf("gain: %s\ntrace: %s\niterations: %d converged: %s\n", art.gain_path.c_str(),
                  art.trace_path.c_str(), art.trace.iterations,
                  art.trace.converged ? "yes" : "no");
      if (!art.trace.converged) {
        return kExitNotConverged;
      }
    } else if (validate_cmd->parsed()) {
      const auto results = adptrack::run_validate(cfg, args.gains, args.out_dir);
      for (std::size_t i = 0; i < results.size(); ++i) {
        std::printf("%s: final accumulated cost %.6g over %d repetition(s)%s\n",
                    args.gains[i].c_str(), results[i].final_cost_mean, cfg.repetitions,
                    results[i].repetitions.front().edge_contact ? " [edge contact]" : "");
      }
    } else if (compare->parsed()) {
      const auto report = adptrack::run_compare(cfg, args.out_dir);
      std::printf("learned gain: ");
      for (long i = 0; i < report.learned.coeffs.size(); ++i) {
        std::printf("% .4g ", report.learned.coeffs[i]);
      }
      std::printf("\nmodel gain:   ");
      for (long i = 0; i < report.model.coeffs.size(); ++i) {
        std::printf("% .4g ", report.model.coeffs[i]);
      }
      std::printf("\nmax relative gain difference: %.3g\n", report.max_rel_gain_diff);
      std::printf("offset current: %.3g A against disturbance %.3g A\n",
                  -report.learned.loff(), cfg.disturbance);
      std::printf("final cost (adp/model): %.6g / %.6g\nreport: %s\n", report.learned_final_cost,
                  report.model_final_cost, report.report_path.c_str());
      if (!report.converged) {
        return kExitNotConverged;
      }
    } else if (rect2d->parsed()) {
      const auto art = adptrack::run_rect2d(cfg, args.gains, args.out_dir);
      std::printf("wrote %zu rollout file(s) to %s\n", art.csv_paths.size(),
                  args.out_dir.c_str());
      if (art.trained && (!art.axis_x.trace.converged || !art.axis_y.trace.converged)) {
        return kExitNotConverged;
      }
    }
  } catch (const adptrack::NotConverged& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNotConverged;
  } catch (const adptrack::NumericalFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const adptrack::SingularEvaluation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const adptrack::NonConvexInControl& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
