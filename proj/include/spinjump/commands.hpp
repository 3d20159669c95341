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

#ifndef SPINJUMP_COMMANDS_HPP
#define SPINJUMP_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "spinjump/config.hpp"

namespace spinjump {

// Command-line overrides; unset members leave the config value in place.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
};

// Effective output directory: --out flag, then output.directory, then
// $SPINJUMP_OUTPUT_DIR, then ".".
std::string resolve_output_directory(const SimulationConfig& config,
                                     const CliOverrides& overrides);

// The four subcommands.  Each parses + validates the config (a manifest
// is accepted in place of a config), applies the overrides, runs, writes
// CSV artifacts plus a JSON manifest into the output directory, and logs a
// short summary to `out`.  The return value is the process exit status;
// invalid input and runtime failures raise ConfigError / Error instead.
int cmd_run(const std::string& config_path, const CliOverrides& overrides,
            std::ostream& out);
// Like `run` with the method forced to `compare`.
int cmd_compare(const std::string& config_path, const CliOverrides& overrides,
                std::ostream& out);
// Repeated-ensemble convergence study against the master-equation oracle.
int cmd_converge(const std::string& config_path, const CliOverrides& overrides,
                 std::ostream& out);
// Runtime-vs-system-size benchmark of both propagators.
int cmd_bench(const std::string& config_path, const CliOverrides& overrides,
              std::ostream& out);

}  // namespace spinjump

#endif  // SPINJUMP_COMMANDS_HPP
