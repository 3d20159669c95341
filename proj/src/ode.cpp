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

#include "spinjump/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "spinjump/errors.hpp"

namespace spinjump {

namespace {

// Dormand-Prince 5(4) coefficients (Hairer, Norsett & Wanner, "Solving
// Ordinary Differential Equations I", table 5.2, and the DOPRI5 dense
// output).
constexpr double c2 = 1.0 / 5.0;
constexpr double c3 = 3.0 / 10.0;
constexpr double c4 = 4.0 / 5.0;
constexpr double c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                 a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                 e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// Step-size controller constants (PI control with Lund stabilization).
constexpr double kSafetyFactor = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExponent = 0.2 - kBeta * 0.75;
constexpr double kMaxShrink = 5.0;   // hnew/h >= 1/kMaxShrink
constexpr double kMaxGrow = 0.1;     // hnew/h <= 1/kMaxGrow
constexpr double kMinStep = 1e-14;

}  // namespace

void DenseSegment::evaluate(double t, Vector& out) const {
  double theta = (h_ != 0.0) ? (t - t0_) / h_ : 0.0;
  theta = std::clamp(theta, 0.0, 1.0);
  const double theta1 = 1.0 - theta;
  out = r1_ +
        theta * (r2_ + theta1 * (r3_ + theta * (r4_ + theta1 * r5_)));
}

Vector DenseSegment::evaluate(double t) const {
  Vector out(r1_.size());
  evaluate(t, out);
  return out;
}

DormandPrinceStepper::DormandPrinceStepper(RhsFunction rhs, Index dim,
                                           OdeOptions options)
    : rhs_(std::move(rhs)), opt_(options), dim_(dim) {
  if (!(opt_.abs_tol > 0.0) || !(opt_.rel_tol >= 0.0)) {
    throw OdeError("tolerances must be positive", 0.0);
  }
  y_.resize(dim_);
  k1_.resize(dim_);
  k2_.resize(dim_);
  k3_.resize(dim_);
  k4_.resize(dim_);
  k5_.resize(dim_);
  k6_.resize(dim_);
  k7_.resize(dim_);
  ytmp_.resize(dim_);
  ynew_.resize(dim_);
  yerr_.resize(dim_);
}

void DormandPrinceStepper::reset(double t, const Vector& y) {
  if (y.size() != dim_) {
    throw OdeError("state dimension mismatch in reset", t);
  }
  t_ = t;
  y_ = y;
  h_next_ = opt_.initial_step;
  facold_ = 1e-4;
  have_k1_ = false;
  rejected_last_ = false;
}

double DormandPrinceStepper::error_norm(double h) const {
  // yerr_ holds the unscaled weight combination; the error estimate is
  // h * yerr_, measured against sc_i = atol + rtol*max(|y_i|, |ynew_i|).
  double acc = 0.0;
  for (Index i = 0; i < dim_; ++i) {
    const double sc = opt_.abs_tol +
                      opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
    const double e = h * std::abs(yerr_[i]) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(dim_));
}

double DormandPrinceStepper::initial_step_size(double t_limit) {
  // Hairer's starting-step heuristic: match the scale of y'(t0), then
  // refine with a crude second-derivative estimate from one Euler probe.
  double dnf = 0.0, dny = 0.0;
  for (Index i = 0; i < dim_; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
    const double f = std::abs(k1_[i]) / sc;
    const double yv = std::abs(y_[i]) / sc;
    dnf += f * f;
    dny += yv * yv;
  }
  double h;
  if (dnf <= 1e-10 || dny <= 1e-10) {
    h = 1e-6;
  } else {
    h = std::sqrt(dny / dnf) * 0.01;
  }
  h = std::min(h, opt_.max_step);
  h = std::min(h, t_limit - t_);

  ytmp_ = y_ + h * k1_;
  rhs_(t_ + h, ytmp_, k2_);
  ++nfev_;
  double der2 = 0.0;
  for (Index i = 0; i < dim_; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
    const double d = std::abs(k2_[i] - k1_[i]) / sc;
    der2 += d * d;
  }
  der2 = std::sqrt(der2) / h;

  const double der12 = std::max(der2, std::sqrt(dnf));
  double h1;
  if (der12 <= 1e-15) {
    h1 = std::max(1e-6, h * 1e-3);
  } else {
    h1 = std::pow(0.01 / der12, 0.2);
  }
  return std::min({100.0 * h, h1, opt_.max_step, t_limit - t_});
}

bool DormandPrinceStepper::step(double t_limit, DenseSegment& segment) {
  if (t_ >= t_limit) return false;

  if (!have_k1_) {
    rhs_(t_, y_, k1_);
    ++nfev_;
    have_k1_ = true;
  }
  double h = h_next_;
  if (h <= 0.0) h = initial_step_size(t_limit);
  h = std::min(h, opt_.max_step);

  // A bound on consecutive rejections within one step attempt; each
  // rejection shrinks h by at least 10%, so hitting this means the
  // problem demands steps below the underflow floor anyway.
  int rejections_this_call = 0;

  for (;;) {
    bool clamped = false;
    if (t_ + h >= t_limit) {
      h = t_limit - t_;
      clamped = true;
    }
    if (h < kMinStep) {
      // A clamped sliver of a step can be smaller than the underflow
      // floor; treat the remaining gap as already integrated.
      if (clamped && t_limit - t_ < kMinStep) {
        t_ = t_limit;
        return false;
      }
      throw OdeError("step size underflow at t = " + std::to_string(t_), t_);
    }
    if (rejections_this_call > 500) {
      throw OdeError("step repeatedly rejected at t = " + std::to_string(t_),
                     t_);
    }

    ytmp_ = y_ + h * (a21 * k1_);
    rhs_(t_ + c2 * h, ytmp_, k2_);
    ytmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t_ + c3 * h, ytmp_, k3_);
    ytmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t_ + c4 * h, ytmp_, k4_);
    ytmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t_ + c5 * h, ytmp_, k5_);
    ytmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t_ + h, ytmp_, k6_);
    ynew_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t_ + h, ynew_, k7_);  // FSAL stage
    nfev_ += 6;

    yerr_ = e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_;
    const double err = error_norm(h);

    const double fac11 = std::pow(err, kExponent);
    if (err <= 1.0) {
      // Accepted.  Lund-stabilized step-size proposal for the next step.
      facold_ = std::max(err, 1e-4);
      double fac = fac11 / std::pow(facold_, kBeta);
      fac = std::max(kMaxGrow, std::min(kMaxShrink, fac / kSafetyFactor));
      double hnew = h / fac;
      if (rejected_last_) hnew = std::min(hnew, h);
      rejected_last_ = false;

      // Dense output for the accepted step.
      segment.t0_ = t_;
      segment.h_ = h;
      segment.r1_ = y_;
      segment.r2_ = ynew_ - y_;
      segment.r3_ = h * k1_ - segment.r2_;
      segment.r4_ = segment.r2_ - h * k7_ - segment.r3_;
      segment.r5_ =
          h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);

      t_ = clamped ? t_limit : t_ + h;
      y_.swap(ynew_);
      k1_.swap(k7_);  // FSAL: the last stage is the first of the next step
      h_next_ = std::min(hnew, opt_.max_step);
      ++naccept_;
      return true;
    }

    // Rejected: shrink and retry.
    h = h / std::min(kMaxShrink, fac11 / kSafetyFactor);
    rejected_last_ = true;
    ++nreject_;
    ++rejections_this_call;
  }
}

std::vector<double> make_time_grid(double t_max, double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0)) {
    throw OdeError("time grid requires t_max > 0 and dt > 0", 0.0);
  }
  const auto n = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(t_max / dt)));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(n);
  }
  grid.back() = t_max;
  return grid;
}

void integrate_with_segments(
    DormandPrinceStepper& stepper, double t_end,
    const std::function<void(const DenseSegment&)>& on_segment) {
  DenseSegment segment;
  while (stepper.step(t_end, segment)) {
    on_segment(segment);
  }
}

NormCrossing refine_norm_crossing(const DenseSegment& segment,
                                  double threshold) {
  constexpr double kResidualTolerance = 1e-10;
  constexpr int kMaxIterations = 100;

  Vector scratch(segment.evaluate(segment.t_begin()));
  const auto residual = [&](double t) {
    segment.evaluate(t, scratch);
    return scratch.squaredNorm() - threshold;
  };

  double lo = segment.t_begin();
  double hi = segment.t_end();
  double g_lo = residual(lo);
  double g_hi = residual(hi);

  if (g_lo <= 0.0) {
    // The threshold was already met at the segment start: immediate event.
    segment.evaluate(lo, scratch);
    return NormCrossing{lo, scratch};
  }
  if (g_hi > 0.0) {
    throw OdeError("norm crossing not bracketed by segment", hi);
  }

  // Illinois-type regula falsi: a secant candidate stays inside the
  // bracket because the endpoint residuals have opposite signs; halving a
  // retained endpoint's residual prevents one-sided stagnation.
  int iterations = 0;
  int lo_retained = 0, hi_retained = 0;
  while (iterations < kMaxIterations) {
    ++iterations;
    double t_mid = lo - g_lo * (hi - lo) / (g_hi - g_lo);
    const double width = hi - lo;
    if (!(t_mid > lo) || !(t_mid < hi)) t_mid = lo + 0.5 * width;
    const double g_mid = residual(t_mid);
    if (std::abs(g_mid) <= kResidualTolerance) {
      segment.evaluate(t_mid, scratch);
      return NormCrossing{t_mid, scratch};
    }
    if (g_mid > 0.0) {
      lo = t_mid;
      g_lo = g_mid;
      hi_retained += 1;
      lo_retained = 0;
      if (hi_retained >= 2) g_hi *= 0.5;
    } else {
      hi = t_mid;
      g_hi = g_mid;
      lo_retained += 1;
      hi_retained = 0;
      if (lo_retained >= 2) g_lo *= 0.5;
    }
    if (hi - lo < 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(hi))) {
      break;
    }
  }

  // Fallback: plain bisection on the true residual (the Illinois scaling
  // above may have distorted the stored endpoint values).
  g_lo = residual(lo);
  for (int i = 0; i < 200; ++i) {
    const double t_mid = lo + 0.5 * (hi - lo);
    const double g_mid = residual(t_mid);
    if (std::abs(g_mid) <= kResidualTolerance) {
      segment.evaluate(t_mid, scratch);
      return NormCrossing{t_mid, scratch};
    }
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = t_mid;
      g_lo = g_mid;
    } else {
      hi = t_mid;
    }
    if (hi - lo < 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(hi))) {
      break;
    }
  }
  const double t_final = lo + 0.5 * (hi - lo);
  segment.evaluate(t_final, scratch);
  return NormCrossing{t_final, scratch};
}

}  // namespace spinjump
