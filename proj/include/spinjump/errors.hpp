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

#ifndef SPINJUMP_ERRORS_HPP
#define SPINJUMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spinjump {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid model specification (bad spins, negative rates, ...).
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(what) {}
};

// Configuration file problems.  `field()` names the offending entry with a
// dotted path such as "system.kinetics.k_b" so users can find it quickly.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Integration failures.  `time_reached()` reports how far the integrator
// got before giving up (e.g. on step-size underflow).
class OdeError : public Error {
 public:
  OdeError(const std::string& what, double time_reached)
      : Error(what), time_reached_(time_reached) {}

  double time_reached() const { return time_reached_; }

 private:
  double time_reached_;
};

// Filesystem / output problems.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace spinjump

#endif  // SPINJUMP_ERRORS_HPP
