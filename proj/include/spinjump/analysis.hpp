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

#ifndef SPINJUMP_ANALYSIS_HPP
#define SPINJUMP_ANALYSIS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spinjump/master_equation.hpp"
#include "spinjump/mcwf.hpp"
#include "spinjump/model.hpp"

namespace spinjump {

enum class SeriesLabel { P1, PS, F1, FS };

std::string series_label_name(SeriesLabel label);

// A sampled observable with optional per-point standard errors.
struct ObservableSeries {
  std::vector<double> grid;           // us, strictly increasing
  std::vector<double> values;
  std::vector<double> stderr_values;  // empty when unavailable
  SeriesLabel label = SeriesLabel::P1;

  void validate() const;  // throws Error on malformed series
};

// Convenience constructors from the two propagators.
ObservableSeries p1_series(const EnsembleResult& ensemble);
ObservableSeries ps_series(const EnsembleResult& ensemble);
ObservableSeries p1_series(const MasterEquationSeries& me);
ObservableSeries ps_series(const MasterEquationSeries& me);

// f_i(t) = p_i(t) * e^{+k_f t}; the standard error scales by the same
// factor.  Input label must be P1 or PS (output F1/FS).
ObservableSeries f_transform(const ObservableSeries& series, double k_f);

// Trapezoidal integral of the series over [0, t_max].  If t_max falls
// between grid points the last cell is included up to t_max with linear
// interpolation; t_max beyond the grid is a range error.
double trapezoid_integral(const ObservableSeries& series, double t_max);

struct YieldEstimate {
  double value = 0.0;
  // Conservative bound: rate * integral of the pointwise stderr, treating
  // the errors along one ensemble's series as fully correlated (they
  // are: all points share the same trajectories).  0 when the series
  // carries no stderr.
  double stderr_value = 0.0;
  // Yields are truncated at t_max, never extrapolated.
  double truncation_time = 0.0;
};

// Y = rate * integral_0^{t_max} series dt.
YieldEstimate yield_from_series(const ObservableSeries& series, double rate,
                                double t_max);

struct Yields {
  YieldEstimate singlet;   // Y_S = k_b * integral pS
  YieldEstimate survival;  // Y_1 = k_f * integral p1
};

Yields reaction_yields(const ObservableSeries& p1, const ObservableSeries& ps,
                       double k_b, double k_f, double t_max);

// E = sqrt( (1/t_max) * integral_0^{t_max} (a-b)^2 dt ), trapezoidal.
// The two series must share their grid exactly.
double rms_error(const ObservableSeries& a, const ObservableSeries& b,
                 double t_max);

struct ConvergencePoint {
  std::size_t samples = 0;
  double e1_mean = 0.0;
  double e1_stderr = 0.0;  // NaN when repeats == 1
  double es_mean = 0.0;
  double es_stderr = 0.0;  // NaN when repeats == 1
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  // log10(E1) vs log10(N) least-squares fit over the point means.
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
};

// For each N in `sample_sizes`, runs `repeats` independent ensembles
// (seeds derived from master_seed, the size index and the repeat index)
// and reports the RMS error of f1 (and fS) against the ME oracle.  The
// oracle must be integrated on the same grid as the MCWF runs.
ConvergenceReport convergence_study(const SpinSystemSpec& spec,
                                    const McwfOptions& options,
                                    const std::vector<std::size_t>& sample_sizes,
                                    std::size_t repeats,
                                    std::uint64_t master_seed, unsigned workers,
                                    const MasterEquationSeries& oracle);

// Throws Error unless the two system specs are identical except for the
// direction of the external field (magnitudes must match too).
void require_equal_except_field(const SpinSystemSpec& a,
                                const SpinSystemSpec& b);

struct AnisotropyDelta {
  double delta = 0.0;         // Y_1(a) - Y_1(b)
  double stderr_value = 0.0;  // quadrature-combined
};

AnisotropyDelta anisotropy_delta(const SpinSystemSpec& spec_a,
                                 const YieldEstimate& y1_a,
                                 const SpinSystemSpec& spec_b,
                                 const YieldEstimate& y1_b);

// Least-squares slope/intercept with the slope's standard error;
// shared by the convergence study and the scaling benchmark.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spinjump

#endif  // SPINJUMP_ANALYSIS_HPP
