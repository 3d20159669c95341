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

#ifndef SPINJUMP_CONFIG_HPP
#define SPINJUMP_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spinjump/mcwf.hpp"
#include "spinjump/model.hpp"
#include "spinjump/types.hpp"

namespace spinjump {

enum class RunMethod { Mcwf, MasterEquation, Compare };

std::string method_name(RunMethod method);
RunMethod method_from_name(const std::string& name);  // throws ConfigError

// Parameters of the `converge` subcommand (run.convergence block).
struct ConvergenceSettings {
  std::vector<std::size_t> sample_sizes = {100, 1000, 10000};
  std::size_t repeats = 4;
};

// Parameters of the `bench` subcommand (run.bench block).  The benchmark
// grows the configured system by adding protons with fixed isotropic
// couplings and times both propagators on each size.
struct BenchSettings {
  std::size_t added_protons = 4;
  double t_max = 0.25;        // us; short span, timing only
  std::size_t n_samples = 32; // MCWF trajectories per size
};

struct RunSettings {
  RunMethod method = RunMethod::Mcwf;
  std::size_t n_samples = 1000;
  std::uint64_t master_seed = 1;
  double t_max = 1.0;     // us
  double grid_dt = 1e-3;  // us
  InitialStateStrategy strategy = InitialStateStrategy::SpinCoherent;
  unsigned worker_count = 1;
  bool factor_kf = false;

  double mcwf_abs_tol = 1e-8;
  double mcwf_rel_tol = 1e-6;
  double me_abs_tol = 1e-8;
  double me_rel_tol = 1e-8;
  Index me_dim_limit = 4096;

  ConvergenceSettings convergence;
  BenchSettings bench;
};

struct OutputSettings {
  // Empty = not configured; the effective directory is then taken from
  // the SPINJUMP_OUTPUT_DIR environment variable, falling back to ".".
  std::string directory;
  std::vector<std::string> formats = {"csv"};  // "csv" and/or "gnuplot"
};

struct SimulationConfig {
  SpinSystemSpec system;
  RunSettings run;
  OutputSettings output;
  std::string source_path;  // file it was parsed from (informational)
};

// Parses and fully validates a config file (JSON).  Shorthand forms are
// expanded (isotropic/axial hyperfine to 3x3 tensors, scalar g and
// random-field rates to per-electron pairs, direction+magnitude fields to
// vectors).  Malformed content raises ConfigError naming the offending
// field by its dotted path.  A run manifest (an object with a "config"
// member) is accepted anywhere a config is: the embedded echo is parsed,
// which reproduces the original run.
SimulationConfig parse_config(const std::string& path);

// Same, from in-memory text (used by tests and manifest round-trips).
SimulationConfig parse_config_text(const std::string& text,
                                   const std::string& source_name = "<text>");

// Canonical JSON echo of a parsed config: every default made explicit,
// shorthand expanded, keys sorted.  parse_config_text(config_echo(c))
// reproduces c exactly (numbers round-trip bitwise), which is what makes
// manifests re-runnable.
std::string config_echo(const SimulationConfig& config);

// Throws ConfigError when `dim` exceeds `cap`, with a message carrying the
// cap and a memory/cost estimate.  Shared by parse-time validation and the
// command layer.
void require_me_dimension(Index dim, Index cap);

}  // namespace spinjump

#endif  // SPINJUMP_CONFIG_HPP
