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

#ifndef SPINJUMP_MASTER_EQUATION_HPP
#define SPINJUMP_MASTER_EQUATION_HPP

#include <functional>
#include <string>
#include <vector>

#include "spinjump/model.hpp"
#include "spinjump/types.hpp"

namespace spinjump {

// Extra superoperator contribution: the callee must *add* its term to
// `drho`.  Used e.g. to compare alternative (non-Lindblad) forms of a
// dissipator against the built-in channels.
using ExtraSuperoperator = std::function<void(
    double t, const Eigen::Ref<const DenseMatrix>& rho,
    Eigen::Ref<DenseMatrix> drho)>;

struct MasterEquationOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double grid_dt = 1e-3;  // us
  // Hilbert-space dimension above which integration is refused; raise
  // explicitly when a large direct solve is intended.
  Index dim_limit = 4096;
  ExtraSuperoperator extra_superoperator;
  // Spot-check trace/hermiticity/positivity along the way (cheap relative
  // to the integration itself).
  bool validate = true;
};

struct MasterEquationSeries {
  std::vector<double> grid;  // us
  std::vector<double> p1;    // Re tr(rho)
  std::vector<double> ps;    // Re tr(P_S rho)

  DenseMatrix final_density;

  // Diagnostics collected when options.validate is set.
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<std::string> warnings;

  long long rhs_evaluations = 0;
  long long steps_accepted = 0;
};

// rho(0) = P_S / tr(P_S): the fully mixed nuclear bath conditioned on an
// electronic singlet.
DenseMatrix initial_density(const ModelOperators& model);

// One evaluation of the master-equation right-hand side at `rho`:
// A rho + rho A^dag + sum_m J_m rho J_m^dag (+ extra, called with t = 0).
// Exposed so the generator itself can be probed without integrating.
DenseMatrix liouvillian_rhs(const ModelOperators& model,
                            const DenseMatrix& rho,
                            const ExtraSuperoperator& extra = {});

// Integrates drho/dt = A rho + rho A^dag + sum_m J_m rho J_m^dag (plus any
// extra superoperator) from `initial` over [0, t_max], recording the trace
// and singlet observables on the uniform output grid.
MasterEquationSeries integrate_master_equation(
    const ModelOperators& model, const DenseMatrix& initial, double t_max,
    const MasterEquationOptions& options = {});

// Convenience overload starting from initial_density(model).
MasterEquationSeries integrate_master_equation(
    const ModelOperators& model, double t_max,
    const MasterEquationOptions& options = {});

// Validation helpers (also used by tests).
double density_trace(const DenseMatrix& rho);       // Re tr(rho)
double hermiticity_defect(const DenseMatrix& rho);  // max |rho - rho^dag|
double smallest_eigenvalue(const DenseMatrix& rho);  // of (rho+rho^dag)/2

}  // namespace spinjump

#endif  // SPINJUMP_MASTER_EQUATION_HPP
