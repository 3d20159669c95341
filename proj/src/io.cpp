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

#include "spinjump/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinjump/errors.hpp"

namespace spinjump {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.15g", value);
  return buffer;
}

std::string render_csv(const std::vector<CsvColumn>& columns) {
  if (columns.empty()) throw IoError("csv table needs at least one column");
  const std::size_t rows = columns.front().values->size();
  std::string out;
  out.reserve(rows * columns.size() * 20 + 64);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].values->size() != rows) {
      throw IoError("csv column '" + columns[c].name +
                    "' length differs from the first column");
    }
    if (c) out += ',';
    out += columns[c].name;
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double((*columns[c].values)[r]);
    }
    out += '\n';
  }
  return out;
}

std::string render_gnuplot(const std::string& csv_name,
                           std::size_t value_columns,
                           const std::string& title) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel 't (us)'\n"
    << "set title '" << title << "'\n"
    << "set grid\n"
    << "plot ";
  for (std::size_t c = 0; c < value_columns; ++c) {
    if (c) s << ", ";
    s << (c == 0 ? "'" + csv_name + "'" : "''") << " using 1:" << (c + 2)
      << " with lines";
  }
  s << "\n";
  return s.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " +
                    target.parent_path().string() + ": " + ec.message());
    }
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failure on " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    throw IoError("cannot move " + tmp.string() + " into place: " +
                  ec.message());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return buffer.str();
}

}  // namespace spinjump
