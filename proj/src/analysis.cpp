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

#include "spinjump/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinjump/errors.hpp"

namespace spinjump {

namespace {

constexpr double kRangeSlack = 1e-9;  // us; tolerated float fuzz at the edge

// Integrates `f` (given at the series grid points) over [0, t_max] with
// the trapezoidal rule, entering the final partial cell by linear
// interpolation when t_max is not a grid point.
double trapezoid_raw(const std::vector<double>& grid,
                     const std::vector<double>& values, double t_max) {
  if (t_max < grid.front() - kRangeSlack ||
      t_max > grid.back() + kRangeSlack) {
    throw Error("integration bound " + std::to_string(t_max) +
                " outside series range [" + std::to_string(grid.front()) +
                ", " + std::to_string(grid.back()) + "]");
  }
  t_max = std::min(t_max, grid.back());
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= t_max) {
      acc += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
      if (grid[i] == t_max) return acc;
    } else {
      const double span = grid[i] - grid[i - 1];
      const double frac = (t_max - grid[i - 1]) / span;
      const double v_end = values[i - 1] + frac * (values[i] - values[i - 1]);
      acc += 0.5 * (values[i - 1] + v_end) * (t_max - grid[i - 1]);
      return acc;
    }
  }
  return acc;
}

ObservableSeries from_parts(const std::vector<double>& grid,
                            const std::vector<double>& values,
                            const std::vector<double>& stderr_values,
                            SeriesLabel label) {
  ObservableSeries s;
  s.grid = grid;
  s.values = values;
  s.stderr_values = stderr_values;
  s.label = label;
  s.validate();
  return s;
}

}  // namespace

std::string series_label_name(SeriesLabel label) {
  switch (label) {
    case SeriesLabel::P1:
      return "p1";
    case SeriesLabel::PS:
      return "pS";
    case SeriesLabel::F1:
      return "f1";
    case SeriesLabel::FS:
      return "fS";
  }
  return "unknown";
}

void ObservableSeries::validate() const {
  if (grid.size() < 2) throw Error("series needs at least two grid points");
  if (values.size() != grid.size()) {
    throw Error("series value/grid size mismatch");
  }
  if (!stderr_values.empty() && stderr_values.size() != grid.size()) {
    throw Error("series stderr/grid size mismatch");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error("series grid must be strictly increasing");
    }
    if (!std::isfinite(values[i])) {
      throw Error("series contains a non-finite value");
    }
  }
}

ObservableSeries p1_series(const EnsembleResult& ensemble) {
  return from_parts(ensemble.grid, ensemble.p1, ensemble.p1_stderr,
                    SeriesLabel::P1);
}

ObservableSeries ps_series(const EnsembleResult& ensemble) {
  return from_parts(ensemble.grid, ensemble.ps, ensemble.ps_stderr,
                    SeriesLabel::PS);
}

ObservableSeries p1_series(const MasterEquationSeries& me) {
  return from_parts(me.grid, me.p1, {}, SeriesLabel::P1);
}

ObservableSeries ps_series(const MasterEquationSeries& me) {
  return from_parts(me.grid, me.ps, {}, SeriesLabel::PS);
}

ObservableSeries f_transform(const ObservableSeries& series, double k_f) {
  series.validate();
  if (series.label != SeriesLabel::P1 && series.label != SeriesLabel::PS) {
    throw Error("f_transform expects a p1 or pS series, got " +
                series_label_name(series.label));
  }
  ObservableSeries out = series;
  out.label = series.label == SeriesLabel::P1 ? SeriesLabel::F1
                                              : SeriesLabel::FS;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    const double factor = std::exp(k_f * out.grid[i]);
    out.values[i] *= factor;
    if (!out.stderr_values.empty()) out.stderr_values[i] *= factor;
  }
  return out;
}

double trapezoid_integral(const ObservableSeries& series, double t_max) {
  series.validate();
  return trapezoid_raw(series.grid, series.values, t_max);
}

YieldEstimate yield_from_series(const ObservableSeries& series, double rate,
                                double t_max) {
  series.validate();
  YieldEstimate y;
  y.truncation_time = t_max;
  y.value = rate * trapezoid_raw(series.grid, series.values, t_max);
  if (!series.stderr_values.empty()) {
    y.stderr_value =
        rate * trapezoid_raw(series.grid, series.stderr_values, t_max);
  }
  return y;
}

Yields reaction_yields(const ObservableSeries& p1, const ObservableSeries& ps,
                       double k_b, double k_f, double t_max) {
  Yields y;
  y.singlet = yield_from_series(ps, k_b, t_max);
  y.survival = yield_from_series(p1, k_f, t_max);
  return y;
}

double rms_error(const ObservableSeries& a, const ObservableSeries& b,
                 double t_max) {
  a.validate();
  b.validate();
  if (a.grid.size() != b.grid.size()) {
    throw Error("rms_error: series grids differ in size");
  }
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (a.grid[i] != b.grid[i]) {
      throw Error("rms_error: series grids differ at index " +
                  std::to_string(i));
    }
  }
  std::vector<double> sq(a.grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sq[i] = d * d;
  }
  const double integral = trapezoid_raw(a.grid, sq, t_max);
  return std::sqrt(integral / t_max);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("line fit needs at least two (x, y) points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("line fit is degenerate (constant x)");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
  } else {
    fit.slope_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

ConvergenceReport convergence_study(const SpinSystemSpec& spec,
                                    const McwfOptions& options,
                                    const std::vector<std::size_t>& sample_sizes,
                                    std::size_t repeats,
                                    std::uint64_t master_seed, unsigned workers,
                                    const MasterEquationSeries& oracle) {
  if (sample_sizes.size() < 2) {
    throw Error("convergence study needs at least two sample sizes");
  }
  for (std::size_t i = 1; i < sample_sizes.size(); ++i) {
    if (sample_sizes[i] <= sample_sizes[i - 1]) {
      throw Error("sample sizes must be strictly increasing");
    }
  }
  if (repeats < 1) throw Error("convergence study needs repeats >= 1");

  const double k_f = spec.kinetics.k_triplet;
  const ObservableSeries f1_oracle = f_transform(p1_series(oracle), k_f);
  const ObservableSeries fs_oracle = f_transform(ps_series(oracle), k_f);
  if (f1_oracle.grid.size() != make_time_grid(options.t_max, options.grid_dt).size()) {
    throw Error("oracle grid does not match the requested MCWF grid");
  }
  const double t_max = options.t_max;

  ConvergenceReport report;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ni = 0; ni < sample_sizes.size(); ++ni) {
    std::vector<double> e1_runs, es_runs;
    e1_runs.reserve(repeats);
    es_runs.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
      EnsembleOptions ens;
      ens.samples = sample_sizes[ni];
      ens.workers = workers;
      ens.master_seed = derive_seed(master_seed, ni, r);
      const EnsembleResult run = simulate_ensemble(spec, options, ens);
      e1_runs.push_back(
          rms_error(f_transform(p1_series(run), k_f), f1_oracle, t_max));
      es_runs.push_back(
          rms_error(f_transform(ps_series(run), k_f), fs_oracle, t_max));
    }
    ConvergencePoint point;
    point.samples = sample_sizes[ni];
    const auto mean_stderr = [&](const std::vector<double>& runs, double& mean,
                                 double& se) {
      double s = 0.0;
      for (double v : runs) s += v;
      mean = s / static_cast<double>(runs.size());
      if (runs.size() > 1) {
        double ss = 0.0;
        for (double v : runs) ss += (v - mean) * (v - mean);
        se = std::sqrt(ss / static_cast<double>(runs.size() - 1) /
                       static_cast<double>(runs.size()));
      } else {
        se = nan;
      }
    };
    mean_stderr(e1_runs, point.e1_mean, point.e1_stderr);
    mean_stderr(es_runs, point.es_mean, point.es_stderr);
    report.points.push_back(point);
  }

  std::vector<double> log_n, log_e;
  for (const auto& p : report.points) {
    if (p.e1_mean > 0.0) {
      log_n.push_back(std::log10(static_cast<double>(p.samples)));
      log_e.push_back(std::log10(p.e1_mean));
    }
  }
  const LineFit fit = fit_line(log_n, log_e);
  report.slope = fit.slope;
  report.slope_stderr = fit.slope_stderr;
  report.intercept = fit.intercept;
  return report;
}

void require_equal_except_field(const SpinSystemSpec& a,
                                const SpinSystemSpec& b) {
  const auto fail = [](const std::string& what) {
    throw Error("specs differ beyond the field direction: " + what);
  };
  if (a.g != b.g) fail("g-factors");
  if (a.kinetics.k_singlet != b.kinetics.k_singlet ||
      a.kinetics.k_triplet != b.kinetics.k_triplet) {
    fail("kinetics");
  }
  if (a.dissipation.random_field != b.dissipation.random_field ||
      a.dissipation.singlet_triplet_dephasing !=
          b.dissipation.singlet_triplet_dephasing) {
    fail("dissipation");
  }
  if (a.nuclei.size() != b.nuclei.size()) fail("nucleus count");
  for (std::size_t i = 0; i < a.nuclei.size(); ++i) {
    const auto& na = a.nuclei[i];
    const auto& nb = b.nuclei[i];
    if (na.spin != nb.spin || na.electron != nb.electron ||
        na.hyperfine_mT != nb.hyperfine_mT) {
      fail("nucleus " + std::to_string(i));
    }
  }
  const double mag_a = a.field_mT.norm();
  const double mag_b = b.field_mT.norm();
  if (std::abs(mag_a - mag_b) > 1e-12 * std::max(1.0, mag_a)) {
    fail("field magnitude");
  }
}

AnisotropyDelta anisotropy_delta(const SpinSystemSpec& spec_a,
                                 const YieldEstimate& y1_a,
                                 const SpinSystemSpec& spec_b,
                                 const YieldEstimate& y1_b) {
  require_equal_except_field(spec_a, spec_b);
  AnisotropyDelta d;
  d.delta = y1_a.value - y1_b.value;
  d.stderr_value = std::hypot(y1_a.stderr_value, y1_b.stderr_value);
  return d;
}

}  // namespace spinjump
