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

#include "spinjump/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spinjump/errors.hpp"
#include "spinjump/ode.hpp"

namespace spinjump {

namespace {

// Right-hand side of the master equation acting on the column-stacked
// density matrix.  The superoperator is never materialized: each call
// performs a handful of sparse-times-dense products.
class LiouvilleRhs {
 public:
  LiouvilleRhs(const ModelOperators& model, ExtraSuperoperator extra)
      : dim_(model.dim),
        a_(model.propagation_matrix),
        a_adj_(model.propagation_matrix.adjoint()),
        extra_(std::move(extra)) {
    for (const auto& ch : model.channels) {
      if (ch.kind == ChannelKind::Lindblad) {
        jump_ops_.push_back(ch.op);
        jump_adjoints_.emplace_back(ch.op.adjoint());
      }
    }
    tmp_.resize(dim_, dim_);
  }

  void operator()(double t, const Vector& y, Vector& dydt) {
    Eigen::Map<const DenseMatrix> rho(y.data(), dim_, dim_);
    Eigen::Map<DenseMatrix> out(dydt.data(), dim_, dim_);
    out.noalias() = a_ * rho;
    out.noalias() += rho * a_adj_;
    for (std::size_t m = 0; m < jump_ops_.size(); ++m) {
      tmp_.noalias() = jump_ops_[m] * rho;
      out.noalias() += tmp_ * jump_adjoints_[m];
    }
    if (extra_) extra_(t, rho, out);
  }

 private:
  Index dim_;
  SparseMatrix a_, a_adj_;
  std::vector<SparseMatrix> jump_ops_, jump_adjoints_;
  ExtraSuperoperator extra_;
  DenseMatrix tmp_;
};

double singlet_population(const SparseMatrix& p_singlet, const Vector& y,
                          Index dim) {
  // Re tr(P_S rho) accumulated over the nonzeros of P_S.
  Complex acc(0.0, 0.0);
  for (int j = 0; j < p_singlet.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(p_singlet, j); it; ++it) {
      // rho(col, row) = y[row*dim + col] in column-major stacking.
      acc += it.value() * y[it.row() * dim + it.col()];
    }
  }
  return acc.real();
}

double trace_real(const Vector& y, Index dim) {
  double acc = 0.0;
  for (Index i = 0; i < dim; ++i) acc += y[i * dim + i].real();
  return acc;
}

}  // namespace

DenseMatrix initial_density(const ModelOperators& model) {
  DenseMatrix rho = DenseMatrix(model.p_singlet);
  rho /= static_cast<double>(model.nuclear_multiplicity);
  return rho;
}

DenseMatrix liouvillian_rhs(const ModelOperators& model,
                            const DenseMatrix& rho,
                            const ExtraSuperoperator& extra) {
  if (rho.rows() != model.dim || rho.cols() != model.dim) {
    throw ModelError("density matrix dimension mismatch");
  }
  const Index d = model.dim;
  LiouvilleRhs rhs(model, extra);
  Vector y(d * d), dydt(d * d);
  Eigen::Map<DenseMatrix>(y.data(), d, d) = rho;
  rhs(0.0, y, dydt);
  return Eigen::Map<const DenseMatrix>(dydt.data(), d, d);
}

MasterEquationSeries integrate_master_equation(
    const ModelOperators& model, const DenseMatrix& initial, double t_max,
    const MasterEquationOptions& options) {
  if (model.dim > options.dim_limit) {
    throw ModelError(
        "master equation dimension " + std::to_string(model.dim) +
        " exceeds dim_limit " + std::to_string(options.dim_limit) +
        " (raise MasterEquationOptions::dim_limit to integrate anyway)");
  }
  if (initial.rows() != model.dim || initial.cols() != model.dim) {
    throw ModelError("initial density dimension mismatch");
  }

  const Index d = model.dim;
  MasterEquationSeries series;
  series.grid = make_time_grid(t_max, options.grid_dt);
  const std::size_t n_grid = series.grid.size();
  series.p1.resize(n_grid);
  series.ps.resize(n_grid);

  LiouvilleRhs rhs(model, options.extra_superoperator);
  OdeOptions ode_opts;
  ode_opts.abs_tol = options.abs_tol;
  ode_opts.rel_tol = options.rel_tol;
  DormandPrinceStepper stepper(
      [&rhs](double t, const Vector& y, Vector& dydt) { rhs(t, y, dydt); },
      d * d, ode_opts);

  Vector y0(d * d);
  Eigen::Map<DenseMatrix>(y0.data(), d, d) = initial;
  stepper.reset(0.0, y0);

  // Positivity is only spot-checked: an eigendecomposition per grid point
  // would dwarf the integration cost.
  const std::size_t eig_stride = std::max<std::size_t>(1, n_grid / 16);

  series.p1[0] = trace_real(y0, d);
  series.ps[0] = singlet_population(model.p_singlet, y0, d);
  std::size_t next_grid = 1;

  Vector y_at(d * d);
  double min_eig = std::numeric_limits<double>::infinity();
  double max_herm = 0.0;
  const auto check_point = [&](const Vector& y, std::size_t grid_index) {
    Eigen::Map<const DenseMatrix> rho(y.data(), d, d);
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    max_herm = std::max(max_herm, herm);
    if (grid_index % eig_stride == 0 || grid_index + 1 == n_grid) {
      DenseMatrix sym = 0.5 * (rho + rho.adjoint());
      Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym,
                                                     Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
  };
  if (options.validate) check_point(y0, 0);

  DenseSegment segment;
  while (stepper.step(t_max, segment)) {
    while (next_grid < n_grid && series.grid[next_grid] <= segment.t_end()) {
      segment.evaluate(series.grid[next_grid], y_at);
      series.p1[next_grid] = trace_real(y_at, d);
      series.ps[next_grid] = singlet_population(model.p_singlet, y_at, d);
      if (options.validate) check_point(y_at, next_grid);
      ++next_grid;
    }
  }
  // The last segment ends exactly at t_max, so the grid is always filled.
  if (next_grid < n_grid) {
    throw OdeError("output grid not fully covered", stepper.time());
  }

  series.final_density =
      Eigen::Map<const DenseMatrix>(stepper.state().data(), d, d);
  series.rhs_evaluations = stepper.rhs_evaluations();
  series.steps_accepted = stepper.steps_accepted();

  if (options.validate) {
    series.max_hermiticity_defect = max_herm;
    series.min_eigenvalue = min_eig;
    if (min_eig < -1e-6) {
      series.warnings.push_back(
          "density matrix lost positivity beyond 1e-6 (min eigenvalue " +
          std::to_string(min_eig) + ")");
    }
    if (max_herm > 1e-6) {
      series.warnings.push_back(
          "density matrix hermiticity defect exceeded 1e-6 (" +
          std::to_string(max_herm) + ")");
    }
  }
  return series;
}

MasterEquationSeries integrate_master_equation(
    const ModelOperators& model, double t_max,
    const MasterEquationOptions& options) {
  return integrate_master_equation(model, initial_density(model), t_max,
                                   options);
}

double density_trace(const DenseMatrix& rho) {
  return rho.trace().real();
}

double hermiticity_defect(const DenseMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double smallest_eigenvalue(const DenseMatrix& rho) {
  DenseMatrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace spinjump
