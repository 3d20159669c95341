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

#ifndef SPINJUMP_ODE_HPP
#define SPINJUMP_ODE_HPP

#include <functional>
#include <limits>
#include <vector>

#include "spinjump/types.hpp"

namespace spinjump {

// Right-hand side of y' = f(t, y).  `dydt` is preallocated by the caller.
using RhsFunction =
    std::function<void(double t, const Vector& y, Vector& dydt)>;

struct OdeOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects the step size automatically
};

// Interpolating polynomial over one accepted step [t_begin, t_end].  The
// interpolant is the free 4th-order companion of the 5th-order solution,
// so values off the nodes carry the same accuracy order as the step.
class DenseSegment {
 public:
  double t_begin() const { return t0_; }
  double t_end() const { return t0_ + h_; }
  double width() const { return h_; }

  // Evaluates the interpolant (clamping theta to [0,1] against rounding).
  void evaluate(double t, Vector& out) const;
  Vector evaluate(double t) const;

 private:
  friend class DormandPrinceStepper;
  double t0_ = 0.0;
  double h_ = 0.0;
  Vector r1_, r2_, r3_, r4_, r5_;
};

// Explicit Dormand-Prince 5(4) pair with PI step-size control and the
// classic quartic dense-output formula.  Complex state vectors; the error
// norm uses component moduli against sc_i = atol + rtol*max(|y0_i|,|y1_i|).
class DormandPrinceStepper {
 public:
  DormandPrinceStepper(RhsFunction rhs, Index dim, OdeOptions options);

  // Repositions the integrator; discards step-size history.
  void reset(double t, const Vector& y);

  double time() const { return t_; }
  const Vector& state() const { return y_; }

  // Takes one accepted step, clamped so that time() never passes t_limit
  // (an exactly clamped step lands on t_limit bitwise).  Fills `segment`
  // with the dense interpolant of the step taken.  Returns false without
  // stepping when time() >= t_limit already.  Throws OdeError on step-size
  // underflow (below 1e-14) or when a step keeps being rejected.
  bool step(double t_limit, DenseSegment& segment);

  long long rhs_evaluations() const { return nfev_; }
  long long steps_accepted() const { return naccept_; }
  long long steps_rejected() const { return nreject_; }

 private:
  double error_norm(double h) const;
  double initial_step_size(double t_limit);

  RhsFunction rhs_;
  OdeOptions opt_;
  Index dim_;

  double t_ = 0.0;
  Vector y_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, yerr_;
  double h_next_ = 0.0;
  double facold_ = 1e-4;
  bool have_k1_ = false;
  bool rejected_last_ = false;

  long long nfev_ = 0;
  long long naccept_ = 0;
  long long nreject_ = 0;
};

// Uniform grid {t_max * i / n : i = 0..n} with n = round(t_max / dt); the
// end points are exact and the spacing is within rounding of `dt`.
std::vector<double> make_time_grid(double t_max, double dt);

// Drives the stepper to t_end, invoking `on_segment` after every accepted
// step.  The final segment ends exactly at t_end.
void integrate_with_segments(
    DormandPrinceStepper& stepper, double t_end,
    const std::function<void(const DenseSegment&)>& on_segment);

struct NormCrossing {
  double t = 0.0;
  Vector state;
};

// Locates t* inside `segment` where ||y(t*)||^2 == threshold, given that
// ||y(t_begin)||^2 >= threshold > ||y(t_end)||^2.  Uses a safeguarded
// secant (Illinois) iteration with a bisection fallback; terminates when
// |  ||y||^2 - threshold | <= 1e-10 or the bracket collapses.
NormCrossing refine_norm_crossing(const DenseSegment& segment,
                                  double threshold);

}  // namespace spinjump

#endif  // SPINJUMP_ODE_HPP
