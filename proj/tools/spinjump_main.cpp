// Copyright 2026 The spinjump Authors
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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "spinjump/commands.hpp"
#include "spinjump/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "spinjump: open-system spin dynamics of recombining radical pairs\n"
      "(Monte-Carlo wavefunction ensembles validated against a direct\n"
      "master-equation integrator)"};
  app.require_subcommand(1);

  std::string config_path;
  spinjump::CliOverrides overrides;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path,
                    "JSON config file (a run manifest is accepted too)")
        ->required();
    sub->add_option("--seed", overrides.seed, "override run.master_seed");
    sub->add_option("--samples", overrides.samples,
                    "override run.n_samples");
    sub->add_option("--workers", overrides.workers,
                    "override run.worker_count");
    sub->add_option("--out", overrides.out_dir,
                    "output directory (beats output.directory and "
                    "$SPINJUMP_OUTPUT_DIR)");
  };

  CLI::App* run =
      app.add_subcommand("run", "run the method selected by run.method");
  CLI::App* compare = app.add_subcommand(
      "compare", "run MCWF and the master equation, report deviations");
  CLI::App* converge = app.add_subcommand(
      "converge", "sample-size convergence study against the ME oracle");
  CLI::App* bench = app.add_subcommand(
      "bench", "runtime scaling of both methods vs added protons");
  for (CLI::App* sub : {run, compare, converge, bench}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return spinjump::cmd_run(config_path, overrides, std::cout);
    }
    if (compare->parsed()) {
      return spinjump::cmd_compare(config_path, overrides, std::cout);
    }
    if (converge->parsed()) {
      return spinjump::cmd_converge(config_path, overrides, std::cout);
    }
    if (bench->parsed()) {
      return spinjump::cmd_bench(config_path, overrides, std::cout);
    }
  } catch (const spinjump::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const spinjump::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
