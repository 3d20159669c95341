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

#ifndef SPINJUMP_IO_HPP
#define SPINJUMP_IO_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace spinjump {

// Shortest text that still carries 15 significant digits ("%.15g"); the
// CSV contract requires at least 12.
std::string format_double(double value);

struct CsvColumn {
  std::string name;
  const std::vector<double>* values = nullptr;
};

// Fixed header line, one row per entry, comma separated.  All columns
// must share one length.
std::string render_csv(const std::vector<CsvColumn>& columns);

// A minimal gnuplot script that plots value columns 2..1+value_columns of
// `csv_name` (sitting next to the script) against column 1.
std::string render_gnuplot(const std::string& csv_name,
                           std::size_t value_columns,
                           const std::string& title);

// Atomic file write: temp file in the target directory, then rename.
// Parent directories are created when missing.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace spinjump

#endif  // SPINJUMP_IO_HPP
