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

#include "spinjump/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"

#include "spinjump/errors.hpp"

namespace spinjump {

namespace {

using nlohmann::json;

std::string dotted(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(dotted(path, it.key()), "unknown key");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double get_nonnegative(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (v < 0.0) throw ConfigError(path, "must be >= 0");
  return v;
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
  return v;
}

std::uint64_t get_uint(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a non-negative integer");
}

std::uint64_t get_count(const json& j, const std::string& path) {
  const std::uint64_t v = get_uint(j, path);
  if (v < 1) throw ConfigError(path, "must be >= 1");
  return v;
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Eigen::Vector3d get_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(path, "expected an array of 3 numbers");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = get_number(j[i], path);
  return v;
}

Eigen::Matrix3d get_matrix3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(path, "expected a 3x3 array of numbers");
  }
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) {
      throw ConfigError(path, "expected a 3x3 array of numbers");
    }
    for (int c = 0; c < 3; ++c) m(r, c) = get_number(j[r][c], path);
  }
  return m;
}

std::array<double, 2> get_pair_or_scalar(const json& j,
                                         const std::string& path,
                                         bool require_positive) {
  std::array<double, 2> out{};
  if (j.is_array()) {
    if (j.size() != 2) {
      throw ConfigError(path, "expected a number or an array of 2 numbers");
    }
    out[0] = get_number(j[0], path);
    out[1] = get_number(j[1], path);
  } else {
    out[0] = out[1] = get_number(j, path);
  }
  for (double v : out) {
    if (require_positive ? !(v > 0.0) : v < 0.0) {
      throw ConfigError(path,
                        require_positive ? "must be > 0" : "must be >= 0");
    }
  }
  return out;
}

Eigen::Matrix3d parse_hyperfine(const json& j, const std::string& path) {
  if (j.is_number()) {
    return get_number(j, path) * Eigen::Matrix3d::Identity();
  }
  require_object(j, path);
  check_keys(j, path, {"isotropic", "axial", "axis", "tensor"});
  if (j.contains("tensor")) {
    if (j.size() != 1) {
      throw ConfigError(path, "tensor form takes no other keys");
    }
    const Eigen::Matrix3d m = get_matrix3(j["tensor"], dotted(path, "tensor"));
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw ConfigError(dotted(path, "tensor"),
                        "hyperfine tensor must be symmetric");
    }
    return m;
  }
  double iso = 0.0;
  if (j.contains("isotropic")) {
    iso = get_number(j["isotropic"], dotted(path, "isotropic"));
  } else if (!j.contains("axial")) {
    throw ConfigError(path, "give isotropic, axial (+axis), or tensor");
  }
  Eigen::Matrix3d m = iso * Eigen::Matrix3d::Identity();
  if (j.contains("axial")) {
    if (!j.contains("axis")) {
      throw ConfigError(dotted(path, "axis"),
                        "axial coupling requires an axis");
    }
    const double ax = get_number(j["axial"], dotted(path, "axial"));
    Eigen::Vector3d n = get_vec3(j["axis"], dotted(path, "axis"));
    const double len = n.norm();
    if (!(len > 0.0)) {
      throw ConfigError(dotted(path, "axis"), "axis must be nonzero");
    }
    n /= len;
    // Traceless axial part: principal value iso + 2/3 ax along the axis,
    // iso - 1/3 ax across it.
    m += ax * (n * n.transpose() - Eigen::Matrix3d::Identity() / 3.0);
  } else if (j.contains("axis")) {
    throw ConfigError(dotted(path, "axis"), "axis requires an axial value");
  }
  return m;
}

void parse_field(const json& sys, SpinSystemSpec& spec) {
  const bool direct = sys.contains("field_mT");
  const bool composed = sys.contains("field");
  if (direct && composed) {
    throw ConfigError("system.field",
                      "give either field_mT or field, not both");
  }
  if (direct) {
    spec.field_mT = get_vec3(sys["field_mT"], "system.field_mT");
    return;
  }
  if (!composed) {
    spec.field_mT.setZero();
    return;
  }
  const json& f = require_object(sys["field"], "system.field");
  check_keys(f, "system.field", {"direction", "magnitude_mT"});
  if (!f.contains("direction") || !f.contains("magnitude_mT")) {
    throw ConfigError("system.field",
                      "needs both direction and magnitude_mT");
  }
  const Eigen::Vector3d dir =
      get_vec3(f["direction"], "system.field.direction");
  const double len = dir.norm();
  if (std::abs(len - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "must be a unit vector (norm is " << len << ")";
    throw ConfigError("system.field.direction", msg.str());
  }
  const double mag = get_number(f["magnitude_mT"], "system.field.magnitude_mT");
  spec.field_mT = mag * dir;
}

void parse_kinetics(const json& k, SpinSystemSpec& spec) {
  check_keys(k, "system.kinetics", {"k_b", "k_f", "k_singlet", "k_triplet"});
  const bool recomb = k.contains("k_b") || k.contains("k_f");
  const bool direct = k.contains("k_singlet") || k.contains("k_triplet");
  if (recomb && direct) {
    throw ConfigError("system.kinetics",
                      "give either {k_b, k_f} or {k_singlet, k_triplet}, "
                      "not a mixture");
  }
  if (direct) {
    double ks = 0.0, kt = 0.0;
    if (k.contains("k_singlet")) {
      ks = get_nonnegative(k["k_singlet"], "system.kinetics.k_singlet");
    }
    if (k.contains("k_triplet")) {
      kt = get_nonnegative(k["k_triplet"], "system.kinetics.k_triplet");
    }
    spec.kinetics.k_singlet = ks;
    spec.kinetics.k_triplet = kt;
    return;
  }
  double kb = 0.0, kf = 0.0;
  if (k.contains("k_b")) kb = get_nonnegative(k["k_b"], "system.kinetics.k_b");
  if (k.contains("k_f")) kf = get_nonnegative(k["k_f"], "system.kinetics.k_f");
  spec.kinetics = KineticsSpec::from_recombination(kb, kf);
}

SpinSystemSpec parse_system(const json& sys) {
  require_object(sys, "system");
  check_keys(sys, "system",
             {"g", "field_mT", "field", "nuclei", "kinetics", "dissipation"});
  SpinSystemSpec spec;

  if (sys.contains("g")) {
    spec.g = get_pair_or_scalar(sys["g"], "system.g", /*require_positive=*/true);
  }
  parse_field(sys, spec);

  if (sys.contains("nuclei")) {
    const json& nuclei = sys["nuclei"];
    if (!nuclei.is_array()) {
      throw ConfigError("system.nuclei", "expected an array");
    }
    for (std::size_t i = 0; i < nuclei.size(); ++i) {
      const std::string path = "system.nuclei[" + std::to_string(i) + "]";
      const json& nj = require_object(nuclei[i], path);
      check_keys(nj, path, {"label", "spin", "electron", "hyperfine_mT"});
      NucleusSpec nucleus;
      nucleus.label = nj.contains("label")
                          ? get_string(nj["label"], dotted(path, "label"))
                          : "nucleus" + std::to_string(i + 1);
      if (!nj.contains("spin")) {
        throw ConfigError(dotted(path, "spin"), "missing");
      }
      nucleus.spin = get_positive(nj["spin"], dotted(path, "spin"));
      const double twice = 2.0 * nucleus.spin;
      if (std::abs(twice - std::round(twice)) > 1e-9) {
        throw ConfigError(dotted(path, "spin"),
                          "must be a half-integer (1/2, 1, 3/2, ...)");
      }
      if (!nj.contains("electron")) {
        throw ConfigError(dotted(path, "electron"), "missing");
      }
      const std::uint64_t e = get_uint(nj["electron"], dotted(path, "electron"));
      if (e != 1 && e != 2) {
        throw ConfigError(dotted(path, "electron"),
                          "must be 1 or 2 (which electron it couples to)");
      }
      nucleus.electron = static_cast<int>(e - 1);
      if (!nj.contains("hyperfine_mT")) {
        throw ConfigError(dotted(path, "hyperfine_mT"), "missing");
      }
      nucleus.hyperfine_mT =
          parse_hyperfine(nj["hyperfine_mT"], dotted(path, "hyperfine_mT"));
      spec.nuclei.push_back(nucleus);
    }
  }

  if (sys.contains("kinetics")) {
    parse_kinetics(require_object(sys["kinetics"], "system.kinetics"), spec);
  }

  if (sys.contains("dissipation")) {
    const json& d = require_object(sys["dissipation"], "system.dissipation");
    check_keys(d, "system.dissipation",
               {"random_field", "singlet_triplet_dephasing"});
    if (d.contains("random_field")) {
      spec.dissipation.random_field = get_pair_or_scalar(
          d["random_field"], "system.dissipation.random_field",
          /*require_positive=*/false);
    }
    if (d.contains("singlet_triplet_dephasing")) {
      spec.dissipation.singlet_triplet_dephasing =
          get_nonnegative(d["singlet_triplet_dephasing"],
                          "system.dissipation.singlet_triplet_dephasing");
    }
  }
  return spec;
}

void parse_convergence(const json& c, ConvergenceSettings& out) {
  check_keys(c, "run.convergence", {"sample_sizes", "repeats"});
  if (c.contains("sample_sizes")) {
    const json& sizes = c["sample_sizes"];
    if (!sizes.is_array() || sizes.size() < 2) {
      throw ConfigError("run.convergence.sample_sizes",
                        "expected an array of at least 2 sample counts");
    }
    out.sample_sizes.clear();
    for (const json& s : sizes) {
      const std::uint64_t n = get_count(s, "run.convergence.sample_sizes");
      if (!out.sample_sizes.empty() && n <= out.sample_sizes.back()) {
        throw ConfigError("run.convergence.sample_sizes",
                          "must be strictly increasing");
      }
      out.sample_sizes.push_back(static_cast<std::size_t>(n));
    }
  }
  if (c.contains("repeats")) {
    out.repeats = static_cast<std::size_t>(
        get_count(c["repeats"], "run.convergence.repeats"));
  }
}

void parse_bench(const json& b, BenchSettings& out) {
  check_keys(b, "run.bench", {"added_protons", "t_max", "n_samples"});
  if (b.contains("added_protons")) {
    const std::uint64_t n = get_uint(b["added_protons"], "run.bench.added_protons");
    if (n > 12) {
      throw ConfigError("run.bench.added_protons", "must be <= 12");
    }
    out.added_protons = static_cast<std::size_t>(n);
  }
  if (b.contains("t_max")) {
    out.t_max = get_positive(b["t_max"], "run.bench.t_max");
  }
  if (b.contains("n_samples")) {
    out.n_samples =
        static_cast<std::size_t>(get_count(b["n_samples"], "run.bench.n_samples"));
  }
}

void parse_run(const json& r, RunSettings& run) {
  require_object(r, "run");
  check_keys(r, "run",
             {"method", "n_samples", "master_seed", "t_max", "grid_dt",
              "strategy", "worker_count", "factor_kf", "mcwf_abs_tol",
              "mcwf_rel_tol", "me_abs_tol", "me_rel_tol", "me_dim_limit",
              "convergence", "bench"});
  if (r.contains("method")) {
    run.method = method_from_name(get_string(r["method"], "run.method"));
  }
  if (r.contains("n_samples")) {
    run.n_samples =
        static_cast<std::size_t>(get_count(r["n_samples"], "run.n_samples"));
  }
  if (r.contains("master_seed")) {
    run.master_seed = get_uint(r["master_seed"], "run.master_seed");
  }
  if (r.contains("t_max")) {
    run.t_max = get_positive(r["t_max"], "run.t_max");
  }
  if (r.contains("grid_dt")) {
    run.grid_dt = get_positive(r["grid_dt"], "run.grid_dt");
  }
  if (run.grid_dt > run.t_max) {
    throw ConfigError("run.grid_dt", "must not exceed t_max");
  }
  if (r.contains("strategy")) {
    const std::string name = get_string(r["strategy"], "run.strategy");
    try {
      run.strategy = strategy_from_name(name);
    } catch (const Error&) {
      throw ConfigError("run.strategy",
                        "unknown strategy '" + name +
                            "' (expected spin_coherent, zeeman_random, or "
                            "exhaustive)");
    }
  }
  if (r.contains("worker_count")) {
    run.worker_count =
        static_cast<unsigned>(get_count(r["worker_count"], "run.worker_count"));
  }
  if (r.contains("factor_kf")) {
    run.factor_kf = get_bool(r["factor_kf"], "run.factor_kf");
  }
  if (r.contains("mcwf_abs_tol")) {
    run.mcwf_abs_tol = get_positive(r["mcwf_abs_tol"], "run.mcwf_abs_tol");
  }
  if (r.contains("mcwf_rel_tol")) {
    run.mcwf_rel_tol = get_positive(r["mcwf_rel_tol"], "run.mcwf_rel_tol");
  }
  if (r.contains("me_abs_tol")) {
    run.me_abs_tol = get_positive(r["me_abs_tol"], "run.me_abs_tol");
  }
  if (r.contains("me_rel_tol")) {
    run.me_rel_tol = get_positive(r["me_rel_tol"], "run.me_rel_tol");
  }
  if (r.contains("me_dim_limit")) {
    const std::uint64_t cap = get_count(r["me_dim_limit"], "run.me_dim_limit");
    if (cap < 4) throw ConfigError("run.me_dim_limit", "must be >= 4");
    run.me_dim_limit = static_cast<Index>(cap);
  }
  if (r.contains("convergence")) {
    parse_convergence(require_object(r["convergence"], "run.convergence"),
                      run.convergence);
  }
  if (r.contains("bench")) {
    parse_bench(require_object(r["bench"], "run.bench"), run.bench);
  }
}

void parse_output(const json& o, OutputSettings& out) {
  require_object(o, "output");
  check_keys(o, "output", {"directory", "formats"});
  if (o.contains("directory")) {
    out.directory = get_string(o["directory"], "output.directory");
  }
  if (o.contains("formats")) {
    const json& f = o["formats"];
    if (!f.is_array() || f.empty()) {
      throw ConfigError("output.formats", "expected a non-empty array");
    }
    out.formats.clear();
    for (const json& e : f) {
      const std::string name = get_string(e, "output.formats");
      if (name != "csv" && name != "gnuplot") {
        throw ConfigError("output.formats",
                          "unknown format '" + name +
                              "' (expected csv or gnuplot)");
      }
      out.formats.push_back(name);
    }
  }
}

json echo_system(const SpinSystemSpec& spec) {
  json sys;
  sys["g"] = {spec.g[0], spec.g[1]};
  sys["field_mT"] = {spec.field_mT[0], spec.field_mT[1], spec.field_mT[2]};
  json nuclei = json::array();
  for (const auto& n : spec.nuclei) {
    json nj;
    nj["label"] = n.label;
    nj["spin"] = n.spin;
    nj["electron"] = n.electron + 1;
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
      rows.push_back({n.hyperfine_mT(r, 0), n.hyperfine_mT(r, 1),
                      n.hyperfine_mT(r, 2)});
    }
    nj["hyperfine_mT"] = {{"tensor", rows}};
    nuclei.push_back(nj);
  }
  sys["nuclei"] = nuclei;
  sys["kinetics"] = {{"k_singlet", spec.kinetics.k_singlet},
                     {"k_triplet", spec.kinetics.k_triplet}};
  sys["dissipation"] = {
      {"random_field",
       {spec.dissipation.random_field[0], spec.dissipation.random_field[1]}},
      {"singlet_triplet_dephasing",
       spec.dissipation.singlet_triplet_dephasing}};
  return sys;
}

json echo_run(const RunSettings& run) {
  json r;
  r["method"] = method_name(run.method);
  r["n_samples"] = run.n_samples;
  r["master_seed"] = run.master_seed;
  r["t_max"] = run.t_max;
  r["grid_dt"] = run.grid_dt;
  r["strategy"] = strategy_name(run.strategy);
  r["worker_count"] = run.worker_count;
  r["factor_kf"] = run.factor_kf;
  r["mcwf_abs_tol"] = run.mcwf_abs_tol;
  r["mcwf_rel_tol"] = run.mcwf_rel_tol;
  r["me_abs_tol"] = run.me_abs_tol;
  r["me_rel_tol"] = run.me_rel_tol;
  r["me_dim_limit"] = run.me_dim_limit;
  r["convergence"] = {{"sample_sizes", run.convergence.sample_sizes},
                      {"repeats", run.convergence.repeats}};
  r["bench"] = {{"added_protons", run.bench.added_protons},
                {"t_max", run.bench.t_max},
                {"n_samples", run.bench.n_samples}};
  return r;
}

}  // namespace

std::string method_name(RunMethod method) {
  switch (method) {
    case RunMethod::Mcwf:
      return "mcwf";
    case RunMethod::MasterEquation:
      return "me";
    case RunMethod::Compare:
      return "compare";
  }
  return "unknown";
}

RunMethod method_from_name(const std::string& name) {
  if (name == "mcwf") return RunMethod::Mcwf;
  if (name == "me") return RunMethod::MasterEquation;
  if (name == "compare") return RunMethod::Compare;
  throw ConfigError("run.method", "unknown method '" + name +
                                      "' (expected mcwf, me, or compare)");
}

void require_me_dimension(Index dim, Index cap) {
  if (dim <= cap) return;
  const double gib =
      16.0 * static_cast<double>(dim) * static_cast<double>(dim) /
      (1024.0 * 1024.0 * 1024.0);
  const double cost_ratio = std::pow(static_cast<double>(dim) /
                                         static_cast<double>(cap),
                                     3.0);
  std::ostringstream msg;
  msg << "Hilbert-space dimension " << dim
      << " exceeds the master-equation cap " << cap << ": the density matrix"
      << " alone needs " << std::fixed << std::setprecision(2) << gib
      << " GiB and each step costs roughly " << std::setprecision(0)
      << cost_ratio << "x the capped size (cubic growth); raise"
      << " run.me_dim_limit to force a direct solve";
  throw ConfigError("run.me_dim_limit", msg.str());
}

SimulationConfig parse_config_text(const std::string& text,
                                   const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("json", std::string("parse failure in ") + source_name +
                                  ": " + e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("json", "top level must be an object");
  }
  // A manifest embeds the resolved config it was produced from; accept it
  // transparently so any run can be reproduced from its manifest.
  if (root.contains("config") && root["config"].is_object()) {
    root = root["config"];
  }
  check_keys(root, "", {"system", "run", "output"});
  if (!root.contains("system")) {
    throw ConfigError("system", "missing required section");
  }

  SimulationConfig config;
  config.source_path = source_name;
  config.system = parse_system(root["system"]);
  if (root.contains("run")) parse_run(root["run"], config.run);
  if (root.contains("output")) parse_output(root["output"], config.output);

  try {
    config.system.validate();
  } catch (const Error& e) {
    throw ConfigError("system", e.what());
  }
  if (config.run.method != RunMethod::Mcwf) {
    require_me_dimension(config.system.dimension(), config.run.me_dim_limit);
  }
  return config;
}

SimulationConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on config file: " + path);
  return parse_config_text(buffer.str(), path);
}

std::string config_echo(const SimulationConfig& config) {
  json root;
  root["system"] = echo_system(config.system);
  root["run"] = echo_run(config.run);
  root["output"] = {{"directory", config.output.directory},
                    {"formats", config.output.formats}};
  return root.dump(2) + "\n";
}

}  // namespace spinjump
