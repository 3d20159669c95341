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

#include "spinjump/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "spinjump/analysis.hpp"
#include "spinjump/errors.hpp"
#include "spinjump/io.hpp"
#include "spinjump/master_equation.hpp"
#include "spinjump/mcwf.hpp"
#include "spinjump/model.hpp"

namespace spinjump {

namespace {

using nlohmann::json;

constexpr const char* kToolName = "spinjump";
constexpr const char* kToolVersion = "0.1.0";

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class PhaseClock {
 public:
  PhaseClock()
      : wall0_(std::chrono::steady_clock::now()), cpu0_(std::clock()) {}

  double wall_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         wall0_)
        .count();
  }
  double cpu_s() const {
    return static_cast<double>(std::clock() - cpu0_) / CLOCKS_PER_SEC;
  }

 private:
  std::chrono::steady_clock::time_point wall0_;
  std::clock_t cpu0_;
};

std::string path_join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string config_stem(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  const std::string suffix = "_manifest";
  if (stem.size() > suffix.size() &&
      stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
    stem.resize(stem.size() - suffix.size());
  }
  if (stem.empty()) stem = "spinjump";
  return stem;
}

struct Prepared {
  SimulationConfig config;
  std::string directory;
  std::string stem;
  std::vector<std::string> artifacts;
};

Prepared prepare(const std::string& config_path, const CliOverrides& overrides,
                 std::optional<RunMethod> forced_method) {
  Prepared p;
  p.config = parse_config(config_path);
  if (overrides.seed) p.config.run.master_seed = *overrides.seed;
  if (overrides.samples) p.config.run.n_samples = *overrides.samples;
  if (overrides.workers) p.config.run.worker_count = *overrides.workers;
  if (forced_method) {
    p.config.run.method = *forced_method;
    if (*forced_method != RunMethod::Mcwf) {
      require_me_dimension(p.config.system.dimension(),
                           p.config.run.me_dim_limit);
    }
  }
  p.directory = resolve_output_directory(p.config, overrides);
  p.stem = config_stem(config_path);
  return p;
}

bool wants_format(const SimulationConfig& config, const std::string& name) {
  for (const auto& f : config.output.formats) {
    if (f == name) return true;
  }
  return false;
}

McwfOptions mcwf_options(const RunSettings& run) {
  McwfOptions opt;
  opt.t_max = run.t_max;
  opt.grid_dt = run.grid_dt;
  opt.ode.abs_tol = run.mcwf_abs_tol;
  opt.ode.rel_tol = run.mcwf_rel_tol;
  opt.strategy = run.strategy;
  opt.factor_kf = run.factor_kf;
  return opt;
}

MasterEquationOptions me_options(const RunSettings& run, bool validate) {
  MasterEquationOptions opt;
  opt.abs_tol = run.me_abs_tol;
  opt.rel_tol = run.me_rel_tol;
  opt.grid_dt = run.grid_dt;
  opt.dim_limit = run.me_dim_limit;
  opt.validate = validate;
  return opt;
}

json base_manifest(const Prepared& p, const std::string& command) {
  const SpinSystemSpec& spec = p.config.system;
  json m;
  m["manifest_version"] = 1;
  m["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  m["command"] = command;
  m["created_utc"] = timestamp_utc();
  m["config_source"] = p.config.source_path;
  m["config"] = json::parse(config_echo(p.config));
  m["system"] = {{"dimension", spec.dimension()},
                 {"nuclear_multiplicity", spec.nuclear_multiplicity()},
                 {"nucleus_count", spec.nuclei.size()}};
  m["seed"] = p.config.run.master_seed;
  return m;
}

void write_manifest(Prepared& p, json manifest, const std::string& name) {
  manifest["artifacts"] = p.artifacts;
  write_text_atomic(path_join(p.directory, name), manifest.dump(2) + "\n");
  p.artifacts.push_back(name);
}

void write_series_csv(Prepared& p, const std::string& name,
                      const std::vector<CsvColumn>& columns,
                      const std::string& title) {
  write_text_atomic(path_join(p.directory, name), render_csv(columns));
  p.artifacts.push_back(name);
  if (wants_format(p.config, "gnuplot")) {
    const std::string gp =
        name.substr(0, name.size() - 4) + ".gp";  // foo.csv -> foo.gp
    write_text_atomic(path_join(p.directory, gp),
                      render_gnuplot(name, columns.size() - 1, title));
    p.artifacts.push_back(gp);
  }
}

json yield_json(const YieldEstimate& y) {
  return {{"value", y.value},
          {"stderr", y.stderr_value},
          {"truncation_time_us", y.truncation_time}};
}

json yields_json(const Yields& y) {
  return {{"singlet", yield_json(y.singlet)},
          {"survival", yield_json(y.survival)}};
}

// Yields use the recombination split: k_b = k_S - k_T weighs the singlet
// channel, k_f = k_T the spin-independent loss.
Yields yields_of(const SpinSystemSpec& spec, const ObservableSeries& p1,
                 const ObservableSeries& ps, double t_max) {
  const double k_f = spec.kinetics.k_triplet;
  const double k_b = spec.kinetics.k_singlet - k_f;
  return reaction_yields(p1, ps, k_b, k_f, t_max);
}

struct McwfRun {
  EnsembleResult ensemble;
  double wall_s = 0.0;
  double cpu_s = 0.0;
};

McwfRun execute_mcwf(const SimulationConfig& config) {
  EnsembleOptions ens;
  ens.samples = config.run.n_samples;
  ens.workers = config.run.worker_count;
  ens.master_seed = config.run.master_seed;
  PhaseClock clock;
  McwfRun run;
  run.ensemble = simulate_ensemble(config.system, mcwf_options(config.run), ens);
  run.wall_s = clock.wall_s();
  run.cpu_s = clock.cpu_s();
  return run;
}

struct MeRun {
  MasterEquationSeries series;
  double wall_s = 0.0;
  double cpu_s = 0.0;
};

MeRun execute_me(const SimulationConfig& config) {
  const ModelOperators model = build_model(config.system);
  PhaseClock clock;
  MeRun run;
  run.series = integrate_master_equation(model, config.run.t_max,
                                         me_options(config.run, true));
  run.wall_s = clock.wall_s();
  run.cpu_s = clock.cpu_s();
  return run;
}

json mcwf_counters(const EnsembleResult& r, const SpinSystemSpec& spec) {
  const ModelOperators model = build_model(spec);
  json labels = json::array();
  for (const auto& ch : model.channels) labels.push_back(ch.label);
  return {{"samples", r.samples},
          {"censored", r.censored},
          {"total_jumps", r.total_jumps},
          {"total_steps", r.total_steps},
          {"rhs_evaluations", r.rhs_evaluations},
          {"channel_labels", labels},
          {"reaction_counts", r.reaction_counts},
          {"factored_rate", r.factored_rate}};
}

std::string write_mcwf_outputs(Prepared& p, const EnsembleResult& ensemble) {
  const std::string name = p.stem + "_mcwf.csv";
  write_series_csv(p, name,
                   {{"t_us", &ensemble.grid},
                    {"p1", &ensemble.p1},
                    {"p1_stderr", &ensemble.p1_stderr},
                    {"pS", &ensemble.ps},
                    {"pS_stderr", &ensemble.ps_stderr}},
                   "MCWF ensemble (" + std::to_string(ensemble.samples) +
                       " trajectories)");
  return name;
}

std::string write_me_outputs(Prepared& p, const MasterEquationSeries& series) {
  const std::string name = p.stem + "_me.csv";
  write_series_csv(p, name,
                   {{"t_us", &series.grid},
                    {"p1", &series.p1},
                    {"pS", &series.ps}},
                   "master equation");
  return name;
}

void print_warnings(const MasterEquationSeries& series, std::ostream& out) {
  for (const auto& w : series.warnings) {
    out << "  warning: " << w << "\n";
  }
}

void run_mcwf_command(Prepared& p, std::ostream& out) {
  const SimulationConfig& cfg = p.config;
  const McwfRun run = execute_mcwf(cfg);
  const std::string csv = write_mcwf_outputs(p, run.ensemble);

  const ObservableSeries p1 = p1_series(run.ensemble);
  const ObservableSeries ps = ps_series(run.ensemble);
  const Yields yields = yields_of(cfg.system, p1, ps, cfg.run.t_max);

  json manifest = base_manifest(p, "run");
  manifest["timings"] = {{"mcwf", {{"wall_s", run.wall_s},
                                   {"cpu_s", run.cpu_s}}}};
  manifest["counters"] = {{"mcwf", mcwf_counters(run.ensemble, cfg.system)}};
  manifest["results"] = {{"yields", yields_json(yields)},
                         {"p1_final", run.ensemble.p1.back()},
                         {"ps_final", run.ensemble.ps.back()}};
  write_manifest(p, manifest, p.stem + "_manifest.json");

  out << "mcwf: dim=" << cfg.system.dimension()
      << " samples=" << run.ensemble.samples << " seed="
      << cfg.run.master_seed << " workers=" << cfg.run.worker_count << "\n"
      << "  Y_S = " << format_double(yields.singlet.value) << " +- "
      << format_double(yields.singlet.stderr_value)
      << ", Y_1 = " << format_double(yields.survival.value) << " +- "
      << format_double(yields.survival.stderr_value) << "\n"
      << "  wrote " << path_join(p.directory, csv) << " (wall "
      << format_double(run.wall_s) << " s)\n";
}

void run_me_command(Prepared& p, std::ostream& out) {
  const SimulationConfig& cfg = p.config;
  const MeRun run = execute_me(cfg);
  const std::string csv = write_me_outputs(p, run.series);

  const ObservableSeries p1 = p1_series(run.series);
  const ObservableSeries ps = ps_series(run.series);
  const Yields yields = yields_of(cfg.system, p1, ps, cfg.run.t_max);

  json manifest = base_manifest(p, "run");
  manifest["timings"] = {{"me", {{"wall_s", run.wall_s},
                                 {"cpu_s", run.cpu_s}}}};
  manifest["counters"] = {
      {"me", {{"rhs_evaluations", run.series.rhs_evaluations},
              {"steps_accepted", run.series.steps_accepted}}}};
  manifest["results"] = {{"yields", yields_json(yields)},
                         {"p1_final", run.series.p1.back()},
                         {"ps_final", run.series.ps.back()},
                         {"max_hermiticity_defect",
                          run.series.max_hermiticity_defect},
                         {"min_eigenvalue", run.series.min_eigenvalue},
                         {"warnings", run.series.warnings}};
  write_manifest(p, manifest, p.stem + "_manifest.json");

  out << "me: dim=" << cfg.system.dimension() << " steps="
      << run.series.steps_accepted << "\n"
      << "  Y_S = " << format_double(yields.singlet.value)
      << ", Y_1 = " << format_double(yields.survival.value) << "\n";
  print_warnings(run.series, out);
  out << "  wrote " << path_join(p.directory, csv) << " (wall "
      << format_double(run.wall_s) << " s)\n";
}

void run_compare_command(Prepared& p, std::ostream& out) {
  const SimulationConfig& cfg = p.config;
  const McwfRun mcwf = execute_mcwf(cfg);
  const MeRun me = execute_me(cfg);

  const std::string mcwf_csv = write_mcwf_outputs(p, mcwf.ensemble);
  const std::string me_csv = write_me_outputs(p, me.series);

  const std::size_t n = mcwf.ensemble.grid.size();
  std::vector<double> dp1(n), dps(n);
  double max_dp1 = 0.0, max_dps = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dp1[i] = mcwf.ensemble.p1[i] - me.series.p1[i];
    dps[i] = mcwf.ensemble.ps[i] - me.series.ps[i];
    max_dp1 = std::max(max_dp1, std::abs(dp1[i]));
    max_dps = std::max(max_dps, std::abs(dps[i]));
  }
  const std::string dev_csv = p.stem + "_deviation.csv";
  write_series_csv(p, dev_csv,
                   {{"t_us", &mcwf.ensemble.grid},
                    {"p1_diff", &dp1},
                    {"pS_diff", &dps}},
                   "MCWF - master equation");

  // The headline agreement metric is computed on the f-transformed
  // observables (the trivial spin-independent decay divided out).
  const double k_f = cfg.system.kinetics.k_triplet;
  const double t_max = cfg.run.t_max;
  const double e1 = rms_error(f_transform(p1_series(mcwf.ensemble), k_f),
                              f_transform(p1_series(me.series), k_f), t_max);
  const double es = rms_error(f_transform(ps_series(mcwf.ensemble), k_f),
                              f_transform(ps_series(me.series), k_f), t_max);

  const ObservableSeries mcwf_p1 = p1_series(mcwf.ensemble);
  const ObservableSeries mcwf_ps = ps_series(mcwf.ensemble);
  const Yields mcwf_yields = yields_of(cfg.system, mcwf_p1, mcwf_ps, t_max);
  const Yields me_yields = yields_of(cfg.system, p1_series(me.series),
                                     ps_series(me.series), t_max);

  json manifest = base_manifest(p, "compare");
  manifest["timings"] = {
      {"mcwf", {{"wall_s", mcwf.wall_s}, {"cpu_s", mcwf.cpu_s}}},
      {"me", {{"wall_s", me.wall_s}, {"cpu_s", me.cpu_s}}}};
  manifest["counters"] = {
      {"mcwf", mcwf_counters(mcwf.ensemble, cfg.system)},
      {"me", {{"rhs_evaluations", me.series.rhs_evaluations},
              {"steps_accepted", me.series.steps_accepted}}}};
  manifest["results"] = {
      {"metrics", {{"e1", e1},
                   {"es", es},
                   {"max_abs_p1_diff", max_dp1},
                   {"max_abs_ps_diff", max_dps}}},
      {"yields_mcwf", yields_json(mcwf_yields)},
      {"yields_me", yields_json(me_yields)},
      {"me_warnings", me.series.warnings}};
  write_manifest(p, manifest, p.stem + "_manifest.json");

  out << "compare: dim=" << cfg.system.dimension()
      << " samples=" << mcwf.ensemble.samples << " seed="
      << cfg.run.master_seed << "\n"
      << "  E1 = " << format_double(e1) << ", ES = " << format_double(es)
      << " (f-transformed RMS over [0, " << format_double(t_max) << "] us)\n"
      << "  max |p1 - p1_me| = " << format_double(max_dp1)
      << ", max |pS - pS_me| = " << format_double(max_dps) << "\n";
  print_warnings(me.series, out);
  out << "  wrote " << path_join(p.directory, mcwf_csv) << ", "
      << path_join(p.directory, me_csv) << ", "
      << path_join(p.directory, dev_csv) << "\n";
}

}  // namespace

std::string resolve_output_directory(const SimulationConfig& config,
                                     const CliOverrides& overrides) {
  if (overrides.out_dir && !overrides.out_dir->empty()) {
    return *overrides.out_dir;
  }
  if (!config.output.directory.empty()) return config.output.directory;
  if (const char* env = std::getenv("SPINJUMP_OUTPUT_DIR")) {
    if (*env) return env;
  }
  return ".";
}

int cmd_run(const std::string& config_path, const CliOverrides& overrides,
            std::ostream& out) {
  Prepared p = prepare(config_path, overrides, std::nullopt);
  switch (p.config.run.method) {
    case RunMethod::Mcwf:
      run_mcwf_command(p, out);
      break;
    case RunMethod::MasterEquation:
      run_me_command(p, out);
      break;
    case RunMethod::Compare:
      run_compare_command(p, out);
      break;
  }
  return 0;
}

int cmd_compare(const std::string& config_path, const CliOverrides& overrides,
                std::ostream& out) {
  Prepared p = prepare(config_path, overrides, RunMethod::Compare);
  run_compare_command(p, out);
  return 0;
}

int cmd_converge(const std::string& config_path, const CliOverrides& overrides,
                 std::ostream& out) {
  Prepared p = prepare(config_path, overrides, std::nullopt);
  const SimulationConfig& cfg = p.config;
  require_me_dimension(cfg.system.dimension(), cfg.run.me_dim_limit);

  const ModelOperators model = build_model(cfg.system);
  PhaseClock me_clock;
  const MasterEquationSeries oracle = integrate_master_equation(
      model, cfg.run.t_max, me_options(cfg.run, true));
  const double me_wall = me_clock.wall_s();

  PhaseClock study_clock;
  const ConvergenceReport report = convergence_study(
      cfg.system, mcwf_options(cfg.run), cfg.run.convergence.sample_sizes,
      cfg.run.convergence.repeats, cfg.run.master_seed, cfg.run.worker_count,
      oracle);
  const double study_wall = study_clock.wall_s();

  std::vector<double> n_col, e1_mean, e1_se, es_mean, es_se;
  for (const auto& pt : report.points) {
    n_col.push_back(static_cast<double>(pt.samples));
    e1_mean.push_back(pt.e1_mean);
    e1_se.push_back(pt.e1_stderr);
    es_mean.push_back(pt.es_mean);
    es_se.push_back(pt.es_stderr);
  }
  const std::string csv = p.stem + "_convergence.csv";
  write_text_atomic(path_join(p.directory, csv),
                    render_csv({{"n_samples", &n_col},
                                {"e1_mean", &e1_mean},
                                {"e1_stderr", &e1_se},
                                {"es_mean", &es_mean},
                                {"es_stderr", &es_se}}));
  p.artifacts.push_back(csv);

  json manifest = base_manifest(p, "converge");
  manifest["timings"] = {{"oracle_wall_s", me_wall},
                         {"study_wall_s", study_wall}};
  manifest["results"] = {{"slope", report.slope},
                         {"slope_stderr", report.slope_stderr},
                         {"intercept", report.intercept},
                         {"repeats", cfg.run.convergence.repeats}};
  write_manifest(p, manifest, p.stem + "_convergence_manifest.json");

  out << "converge: dim=" << cfg.system.dimension() << " repeats="
      << cfg.run.convergence.repeats << "\n";
  for (const auto& pt : report.points) {
    out << "  N=" << pt.samples << "  E1=" << format_double(pt.e1_mean)
        << "  ES=" << format_double(pt.es_mean) << "\n";
  }
  out << "  fitted slope of log10 E1 vs log10 N: "
      << format_double(report.slope) << " +- "
      << format_double(report.slope_stderr) << "\n"
      << "  wrote " << path_join(p.directory, csv) << "\n";
  return 0;
}

namespace {

// Average CPU seconds of `fn`, repeating until the total passes a floor so
// sub-millisecond runs do not drown in clock granularity.
template <typename F>
std::pair<double, int> time_cpu(F&& fn, double min_total_s, int max_runs) {
  double total = 0.0;
  int runs = 0;
  do {
    const std::clock_t c0 = std::clock();
    fn();
    total += static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC;
    ++runs;
  } while (total < min_total_s && runs < max_runs);
  return {total / runs, runs};
}

}  // namespace

int cmd_bench(const std::string& config_path, const CliOverrides& overrides,
              std::ostream& out) {
  Prepared p = prepare(config_path, overrides, std::nullopt);
  const SimulationConfig& cfg = p.config;
  const BenchSettings& bench = cfg.run.bench;

  McwfOptions mcwf_opt = mcwf_options(cfg.run);
  mcwf_opt.t_max = bench.t_max;
  MasterEquationOptions me_opt = me_options(cfg.run, /*validate=*/false);
  const std::size_t grid_steps =
      make_time_grid(bench.t_max, cfg.run.grid_dt).size() - 1;

  std::vector<double> n_col, dim_col, me_cpu, me_per_grid, me_steps_col,
      mcwf_cpu, mcwf_steps_col, mcwf_per_step;

  out << "bench: core dim=" << cfg.system.dimension() << ", adding up to "
      << bench.added_protons << " protons, t_max="
      << format_double(bench.t_max) << " us\n";

  for (std::size_t n = 0; n <= bench.added_protons; ++n) {
    SpinSystemSpec spec = cfg.system;
    for (std::size_t k = 0; k < n; ++k) {
      NucleusSpec proton;
      proton.label = "bench_proton" + std::to_string(k + 1);
      proton.spin = 0.5;
      proton.electron = static_cast<int>(k % 2);
      proton.hyperfine_mT =
          (0.3 + 0.07 * static_cast<double>(k)) * Eigen::Matrix3d::Identity();
      spec.nuclei.push_back(proton);
    }
    const Index dim = spec.dimension();
    require_me_dimension(dim, cfg.run.me_dim_limit);
    const ModelOperators model = build_model(spec);

    MasterEquationSeries me_series;
    const auto [me_avg, me_runs] = time_cpu(
        [&] {
          me_series = integrate_master_equation(model, bench.t_max, me_opt);
        },
        0.25, 40);

    EnsembleOptions ens;
    ens.samples = bench.n_samples;
    ens.workers = 1;  // timing run: keep the CPU clock honest
    ens.master_seed = cfg.run.master_seed;
    EnsembleResult mcwf_res;
    const auto [mcwf_avg, mcwf_runs] = time_cpu(
        [&] { mcwf_res = run_ensemble(model, mcwf_opt, ens); }, 0.25, 40);

    n_col.push_back(static_cast<double>(n));
    dim_col.push_back(static_cast<double>(dim));
    me_cpu.push_back(me_avg);
    me_per_grid.push_back(me_avg / static_cast<double>(grid_steps));
    me_steps_col.push_back(static_cast<double>(me_series.steps_accepted));
    mcwf_cpu.push_back(mcwf_avg);
    mcwf_steps_col.push_back(static_cast<double>(mcwf_res.total_steps));
    mcwf_per_step.push_back(mcwf_res.total_steps > 0
                                ? mcwf_avg /
                                      static_cast<double>(mcwf_res.total_steps)
                                : 0.0);

    out << "  n=" << n << " dim=" << dim << "  me "
        << format_double(me_avg) << " s (x" << me_runs << "), mcwf "
        << format_double(mcwf_avg) << " s (x" << mcwf_runs << ")\n";
  }

  const std::string csv = p.stem + "_bench.csv";
  write_text_atomic(path_join(p.directory, csv),
                    render_csv({{"n_added", &n_col},
                                {"dim", &dim_col},
                                {"me_cpu_s", &me_cpu},
                                {"me_s_per_grid_step", &me_per_grid},
                                {"me_steps_accepted", &me_steps_col},
                                {"mcwf_cpu_s", &mcwf_cpu},
                                {"mcwf_steps", &mcwf_steps_col},
                                {"mcwf_s_per_step", &mcwf_per_step}}));
  p.artifacts.push_back(csv);

  // Per-nucleus growth factors from straight-line fits in log space.
  std::vector<double> log_me, log_mcwf;
  for (std::size_t i = 0; i < n_col.size(); ++i) {
    log_me.push_back(std::log10(me_per_grid[i]));
    log_mcwf.push_back(std::log10(mcwf_per_step[i]));
  }
  const LineFit me_fit = fit_line(n_col, log_me);
  const LineFit mcwf_fit = fit_line(n_col, log_mcwf);
  const double me_factor = std::pow(10.0, me_fit.slope);
  const double mcwf_factor = std::pow(10.0, mcwf_fit.slope);

  json manifest = base_manifest(p, "bench");
  manifest["results"] = {
      {"me_growth_factor_per_nucleus", me_factor},
      {"mcwf_growth_factor_per_nucleus", mcwf_factor},
      {"me_metric", "cpu seconds per output grid step"},
      {"mcwf_metric", "cpu seconds per accepted trajectory step"},
      {"grid_steps", grid_steps},
      {"mcwf_samples", bench.n_samples}};
  write_manifest(p, manifest, p.stem + "_bench_manifest.json");

  out << "  growth per added proton: me x" << format_double(me_factor)
      << " (per grid step), mcwf x" << format_double(mcwf_factor)
      << " (per trajectory step)\n"
      << "  wrote " << path_join(p.directory, csv) << "\n";
  return 0;
}

}  // namespace spinjump
