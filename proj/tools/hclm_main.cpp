// Copyright (c) 2026 The hclm Authors. All Rights Reserved.
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


#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hclm/cli/commands.hpp"
#include "hclm/cli/run_config.hpp"
#include "hclm/error.hpp"
#include "hclm/kernels.hpp"

namespace {

using hclm::cli::Overrides;

void add_common(CLI::App* cmd, Overrides& o, std::string& config_path, std::string& kernels) {
  cmd->add_option("--config", config_path, "JSON run configuration; flags override its values");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--alpha", o.levels, "Significance levels")->delimiter(',');
  cmd->add_option("--out", o.out, "Result file (test, tune) or output stem (simulate)");
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = all cores");
  cmd->add_option("--kernels", kernels, "Numeric kernels: auto, scalar, avx2, neon");
  cmd->add_option("--bootstrap", o.bootstrap, "Wild bootstrap draws B (0 = off)");
  cmd->add_option("--dist", o.dist, "Bootstrap multipliers: rademacher or mammen");
  cmd->add_option("--c", o.c, "Penalty constant for choosing r");
}

void add_data(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--data", o.data, "Input CSV with a header row");
  cmd->add_option("--y", o.response, "Response column");
  cmd->add_flag("--rescale", o.rescale, "Map series variables onto [-1, 1] first");
  cmd->add_option("--criterion", o.criterion, "Null-model selection: cp or gcv");
  cmd->add_option("--grid", o.grid, "Candidate series term counts for tuning")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heteroskedasticity-robust specification test for partially linear series regressions"};
  app.set_help_flag();
  app.set_help_all_flag("-h,--help", "Print this help message, including every subcommand, and exit");
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  std::string kernels = "auto";

  auto* test = app.add_subcommand("test", "Run the test on a dataset");
  add_common(test, o, config_path, kernels);
  add_data(test, o);
  test->add_option("--variant", o.variant, "Statistic: korolev_hc, korolev_alt_long, gupta_fgls_long, ...");

  auto* tune = app.add_subcommand("tune", "Choose the null terms and r by data-driven tuning, then test");
  add_common(tune, o, config_path, kernels);
  add_data(tune, o);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo size and power on the simulation design");
  add_common(sim, o, config_path, kernels);
  sim->add_option("--n", o.sample_sizes, "Sample sizes")->delimiter(',');
  sim->add_option("--reps", o.replications, "Monte Carlo replications M");
  sim->add_option("--a-min", o.a_min, "Smallest number of univariate series terms");
  sim->add_option("--a-max", o.a_max, "Largest number of univariate series terms");
  sim->add_option("--family", o.families, "Basis families: power, spline")->delimiter(',');
  sim->add_option("--variants", o.variants, "Test variants")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hclm::cli::kInputError;
  }

  try {
    if (kernels != "auto") hclm::kernels::select(hclm::kernels::parse_isa(kernels));
    hclm::cli::RunConfig cfg = config_path.empty() ? hclm::cli::RunConfig{} : hclm::cli::load_config(config_path);
    hclm::cli::apply_overrides(cfg, o);
    if (test->parsed()) {
      hclm::cli::cmd_test(hclm::cli::load_dataset(cfg), cfg, std::cout);
    } else if (tune->parsed()) {
      cfg.tuning.enabled = true;
      hclm::cli::cmd_tune(hclm::cli::load_dataset(cfg), cfg, std::cout);
    } else {
      hclm::cli::cmd_simulate(cfg, std::cout);
    }
  } catch (const hclm::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hclm::cli::kInputError;
  } catch (const hclm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return hclm::cli::kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hclm::cli::kNumericalError;
  }
  return hclm::cli::kOk;
}
