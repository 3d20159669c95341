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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_helpers.hpp"

#include "spinjump/errors.hpp"
#include "spinjump/master_equation.hpp"
#include "spinjump/mcwf.hpp"
#include "spinjump/model.hpp"

using namespace spinjump;
using testing::bare_pair;
using testing::dense;
using testing::one_proton_system;
using testing::random_state;

namespace {

std::size_t channel_index(const ModelOperators& model,
                          const std::string& label) {
  for (std::size_t i = 0; i < model.channels.size(); ++i) {
    if (model.channels[i].label == label) return i;
  }
  REQUIRE_MESSAGE(false, "channel not found: " << label);
  return 0;
}

Vector triplet_zero_state() {
  Vector t0 = Vector::Zero(4);
  t0[1] = 1.0 / std::sqrt(2.0);
  t0[2] = 1.0 / std::sqrt(2.0);
  return t0;
}

}  // namespace

TEST_SUITE("mcwf") {

TEST_CASE("random streams are deterministic and index-separated") {
  RandomStream a(42, 7);
  RandomStream a2(42, 7);
  RandomStream b(42, 8);
  RandomStream c(43, 7);
  bool all_equal_b = true, all_equal_c = true;
  for (int i = 0; i < 64; ++i) {
    const double u = a.uniform01();
    CHECK(u == a2.uniform01());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    if (u != b.uniform01()) all_equal_b = false;
    if (u != c.uniform01()) all_equal_c = false;
  }
  CHECK_FALSE(all_equal_b);
  CHECK_FALSE(all_equal_c);
}

TEST_CASE("uniform_below stays in range and covers all residues") {
  RandomStream rng(9, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t v = rng.uniform_below(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
  CHECK_THROWS_AS(rng.uniform_below(0), Error);
}

TEST_CASE("derived seeds are stable and distinct across salts") {
  const std::uint64_t s = derive_seed(123, 4, 5);
  CHECK(s == derive_seed(123, 4, 5));
  CHECK(s != derive_seed(123, 4, 6));
  CHECK(s != derive_seed(123, 5, 4));
  CHECK(s != derive_seed(124, 4, 5));
}

TEST_CASE("initial states are normalized electronic singlets") {
  SpinSystemSpec spec = one_proton_system(1.0, 0.5, 1.0, 0.1);
  NucleusSpec n14;
  n14.label = "N1";
  n14.spin = 1.0;
  n14.electron = 1;
  n14.hyperfine_mT = 0.3 * Eigen::Matrix3d::Identity();
  spec.nuclei.push_back(n14);
  const ModelOperators model = build_model(spec);  // Z = 6, dim 24

  for (const auto strategy :
       {InitialStateStrategy::SpinCoherent, InitialStateStrategy::ZeemanRandom,
        InitialStateStrategy::Exhaustive}) {
    RandomStream rng(7, 3);
    for (Index k = 0; k < 6; ++k) {
      const Vector phi = sample_initial_state(model, strategy, rng, k);
      CHECK(std::abs(phi.norm() - 1.0) < 1e-12);
      CHECK(std::abs(real_expectation(model.p_singlet, phi) - 1.0) < 1e-12);
      CHECK(std::abs(real_expectation(model.p_triplet, phi)) < 1e-12);
    }
  }
}

TEST_CASE("spin-coherent sampling averages to the maximally mixed bath") {
  // One spin-1 nucleus: E[|Omega><Omega|] = I/3, so the ensemble density
  // should approach P_S / Z with Monte Carlo error ~ M^(-1/2).
  SpinSystemSpec spec;
  NucleusSpec n14;
  n14.label = "N1";
  n14.spin = 1.0;
  n14.electron = 0;
  n14.hyperfine_mT = 0.3 * Eigen::Matrix3d::Identity();
  spec.nuclei.push_back(n14);
  const ModelOperators model = build_model(spec);
  REQUIRE(model.dim == 12);
  REQUIRE(model.nuclear_multiplicity == 3);

  const std::size_t m_samples = 20000;
  DenseMatrix avg = DenseMatrix::Zero(model.dim, model.dim);
  RandomStream rng(2026, 0);
  for (std::size_t i = 0; i < m_samples; ++i) {
    const Vector phi =
        sample_initial_state(model, InitialStateStrategy::SpinCoherent, rng);
    avg.noalias() += phi * phi.adjoint();
  }
  avg /= static_cast<double>(m_samples);
  const DenseMatrix expected = dense(model.p_singlet) / 3.0;
  const double bound = 5.0 / std::sqrt(static_cast<double>(m_samples));
  CHECK(testing::max_abs(avg - expected) < bound);
}

TEST_CASE("zeeman-random sampling hits every nuclear basis state") {
  const ModelOperators model =
      build_model(one_proton_system(1.0, 0.0, 0.0, 0.0));
  RandomStream rng(5, 1);
  std::set<Index> support_patterns;
  for (int i = 0; i < 400; ++i) {
    const Vector phi =
        sample_initial_state(model, InitialStateStrategy::ZeemanRandom, rng);
    // Exactly two nonzero amplitudes of modulus 1/sqrt(2) (singlet pair).
    Index nonzero = 0;
    Index first = -1;
    for (Index j = 0; j < model.dim; ++j) {
      if (std::abs(phi[j]) > 1e-14) {
        if (first < 0) first = j;
        ++nonzero;
        CHECK(std::abs(std::abs(phi[j]) - 1.0 / std::sqrt(2.0)) < 1e-12);
      }
    }
    CHECK(nonzero == 2);
    support_patterns.insert(first);
  }
  CHECK(support_patterns.size() == 2);  // both proton Zeeman states used
}

TEST_CASE("exhaustive sampling enumerates an orthonormal family") {
  SpinSystemSpec spec = one_proton_system(1.0, 0.0, 0.0, 0.0);
  NucleusSpec n14;
  n14.label = "N1";
  n14.spin = 1.0;
  n14.electron = 1;
  n14.hyperfine_mT = 0.3 * Eigen::Matrix3d::Identity();
  spec.nuclei.push_back(n14);
  const ModelOperators model = build_model(spec);
  const Index z = model.nuclear_multiplicity;
  REQUIRE(z == 6);

  RandomStream rng(1, 0);
  std::vector<Vector> states;
  for (Index k = 0; k < z; ++k) {
    states.push_back(
        sample_initial_state(model, InitialStateStrategy::Exhaustive, rng, k));
  }
  for (Index i = 0; i < z; ++i) {
    for (Index j = 0; j < z; ++j) {
      const Complex overlap = states[i].dot(states[j]);
      CHECK(std::abs(overlap - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }
  CHECK_THROWS_WITH_AS(
      sample_initial_state(model, InitialStateStrategy::Exhaustive, rng, z),
      doctest::Contains("exhaust"), ModelError);
}

TEST_CASE("strategy names round-trip") {
  for (const auto s :
       {InitialStateStrategy::SpinCoherent, InitialStateStrategy::ZeemanRandom,
        InitialStateStrategy::Exhaustive}) {
    CHECK(strategy_from_name(strategy_name(s)) == s);
  }
  CHECK_THROWS_AS(strategy_from_name("bogus"), Error);
}

TEST_CASE("total jump weight equals the anti-hermitian defect") {
  // delta-p identity: sum_n <w_n> = -2 Im <phi|H_eff|phi>.
  SpinSystemSpec spec = one_proton_system(0.9, 0.4, 1.5, 0.3, 0.2);
  spec.dissipation.singlet_triplet_dephasing = 0.7;
  const ModelOperators model = build_model(spec);
  REQUIRE(model.channels.size() == 9);  // 2 reaction + 6 field + dephasing

  const DenseMatrix h_eff = dense(model.effective_hamiltonian);
  for (unsigned seed = 0; seed < 100; ++seed) {
    const Vector phi = random_state(model.dim, 500 + seed);
    const std::vector<double> w = jump_weights(model, phi);
    REQUIRE(w.size() == model.channels.size());
    double total = 0.0;
    for (const double wi : w) {
      CHECK(wi >= 0.0);
      total += wi;
    }
    const double defect = -2.0 * (phi.dot(h_eff * phi)).imag();
    CHECK(std::abs(total - defect) < 1e-10);
  }
}

TEST_CASE("channel selection respects cumulative weights") {
  const std::vector<double> w = {3.0, 1.0};
  CHECK(select_jump_channel(w, 0.0) == 0);
  CHECK(select_jump_channel(w, 0.74) == 0);
  CHECK(select_jump_channel(w, 0.76) == 1);
  CHECK(select_jump_channel(w, 0.999999) == 1);

  const std::vector<double> zeros = {0.0, 1e-16};
  CHECK_THROWS_WITH_AS(select_jump_channel(zeros, 0.5),
                       doctest::Contains("no channel open"), Error);
}

TEST_CASE("channel selection is multinomial in the weights") {
  const std::vector<double> w = {0.75, 0.25};
  RandomStream rng(77, 0);
  const int n = 100000;
  int first = 0;
  for (int i = 0; i < n; ++i) {
    if (select_jump_channel(w, rng.uniform01()) == 0) ++first;
  }
  const double sigma = std::sqrt(n * 0.75 * 0.25);
  CHECK(std::abs(first - n * 0.75) < 4.0 * sigma);
}

TEST_CASE("dephasing jump leaves a singlet state invariant") {
  SpinSystemSpec spec = one_proton_system(1.0, 0.5, 0.0, 0.0);
  spec.dissipation.singlet_triplet_dephasing = 3.0;
  const ModelOperators model = build_model(spec);
  REQUIRE(model.channels.size() == 1);

  RandomStream rng(3, 9);
  const Vector phi =
      sample_initial_state(model, InitialStateStrategy::ZeemanRandom, rng);
  const JumpOutcome out = select_and_apply_jump(model, phi, rng);
  CHECK(out.kind == ChannelKind::Lindblad);
  CHECK(model.channels[out.channel].label == "st_dephasing");
  CHECK((out.state - phi).norm() < 1e-12);  // P_S phi = phi, renormalized
}

TEST_CASE("reaction jumps terminate with an empty post-jump state") {
  const ModelOperators model = build_model(bare_pair(5.0, 0.0));
  RandomStream rng(4, 4);
  const Vector phi =
      sample_initial_state(model, InitialStateStrategy::Exhaustive, rng, 0);
  const JumpOutcome out = select_and_apply_jump(model, phi, rng);
  CHECK(out.kind == ChannelKind::Reaction);
  CHECK(model.channels[out.channel].label == "reaction_singlet");
  CHECK(out.state.size() == 0);
}

TEST_CASE("reaction times follow the exponential waiting-time law") {
  // H = 0 and a pure singlet: the survival probability is exp(-k_S t), so
  // reaction times are Exp(2) with mean 0.5 us and unit coefficient of
  // variation.
  const ModelOperators model = build_model(bare_pair(2.0, 0.0));
  McwfOptions options;
  options.t_max = 12.0;  // censoring probability e^{-24}: negligible
  options.grid_dt = 0.5;
  const std::vector<double> grid =
      make_time_grid(options.t_max, options.grid_dt);
  const std::size_t reaction_idx = channel_index(model, "reaction_singlet");

  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  TrajectoryResult result;
  for (int i = 0; i < n; ++i) {
    RandomStream rng(1234, static_cast<std::uint64_t>(i));
    const Vector phi =
        sample_initial_state(model, InitialStateStrategy::Exhaustive, rng, 0);
    propagate_trajectory(model, options, grid, phi, rng, result);
    REQUIRE(result.reaction_time > 0.0);
    REQUIRE(result.jumps.size() == 1);
    CHECK(result.jumps[0].kind == ChannelKind::Reaction);
    CHECK(result.reaction_channel == static_cast<int>(reaction_idx));
    sum += result.reaction_time;
    sum_sq += result.reaction_time * result.reaction_time;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double cv = std::sqrt(var) / mean;
  // Exp(2): mean 0.5, sd 0.5 -> standard error of the mean 0.005.
  CHECK(std::abs(mean - 0.5) < 4.0 * 0.005);
  CHECK(cv > 0.95);
  CHECK(cv < 1.05);
}

TEST_CASE("grid observables flip to dead after the reaction") {
  const ModelOperators model = build_model(bare_pair(2.0, 0.0));
  McwfOptions options;
  options.t_max = 12.0;
  options.grid_dt = 0.25;
  const std::vector<double> grid =
      make_time_grid(options.t_max, options.grid_dt);

  RandomStream rng(99, 17);
  const Vector phi =
      sample_initial_state(model, InitialStateStrategy::Exhaustive, rng, 0);
  TrajectoryResult result;
  propagate_trajectory(model, options, grid, phi, rng, result);
  REQUIRE(result.reaction_time > 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= result.reaction_time) {
      CHECK(result.alive[i] == 1);
      CHECK(result.singlet[i] == doctest::Approx(1.0).epsilon(1e-9));
    } else {
      CHECK(result.alive[i] == 0);
      CHECK(result.singlet[i] == 0.0);
    }
  }
}

TEST_CASE("a dark state never reacts") {
  // |T0> is orthogonal to the singlet channel; with k_T = 0 and H = 0 the
  // trajectory must be censored at t_max with zero singlet character.
  const ModelOperators model = build_model(bare_pair(2.0, 0.0));
  McwfOptions options;
  options.t_max = 5.0;
  options.grid_dt = 0.5;
  const std::vector<double> grid =
      make_time_grid(options.t_max, options.grid_dt);

  RandomStream rng(11, 0);
  TrajectoryResult result;
  propagate_trajectory(model, options, grid, triplet_zero_state(), rng,
                       result);
  CHECK(result.reaction_time < 0.0);
  CHECK(result.reaction_channel == -1);
  CHECK(result.jumps.empty());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(result.alive[i] == 1);
    CHECK(std::abs(result.singlet[i]) < 1e-12);
  }
}

TEST_CASE("closed-system trajectories are censored and reproduce the "
          "master equation deterministically") {
  // No kinetics, no dissipation: a trajectory never jumps, and the
  // exhaustive two-state ensemble *is* the exact mixed-state evolution.
  const SpinSystemSpec spec = one_proton_system(1.0, 0.5, 0.0, 0.0);
  const ModelOperators model = build_model(spec);

  McwfOptions options;
  options.t_max = 1.0;
  options.grid_dt = 0.01;
  options.ode.abs_tol = 1e-10;
  options.ode.rel_tol = 1e-10;
  options.strategy = InitialStateStrategy::Exhaustive;
  EnsembleOptions ens;
  ens.samples = 2;  // == nuclear multiplicity
  ens.master_seed = 5;
  const EnsembleResult mc = run_ensemble(model, options, ens);

  MasterEquationOptions me_opt;
  me_opt.abs_tol = 1e-10;
  me_opt.rel_tol = 1e-10;
  me_opt.grid_dt = options.grid_dt;
  const MasterEquationSeries me =
      integrate_master_equation(model, options.t_max, me_opt);

  REQUIRE(mc.grid.size() == me.grid.size());
  CHECK(mc.censored == 2);
  CHECK(mc.total_jumps == 0);
  for (std::size_t i = 0; i < mc.grid.size(); ++i) {
    CHECK(mc.p1[i] == 1.0);
    CHECK(mc.p1_stderr[i] == 0.0);
    CHECK(std::abs(mc.ps[i] - me.ps[i]) < 1e-6);
  }
}

TEST_CASE("spin-independent recombination reproduces exponential decay") {
  const SpinSystemSpec spec = one_proton_system(1.0, 0.5, 0.0, 1.0);
  const ModelOperators model = build_model(spec);

  McwfOptions options;
  options.t_max = 2.0;
  options.grid_dt = 0.05;
  EnsembleOptions ens;
  ens.samples = 4000;
  ens.master_seed = 20260815;
  const EnsembleResult mc = run_ensemble(model, options, ens);

  long long reacted = 0;
  for (const long long c : mc.reaction_counts) reacted += c;
  CHECK(reacted + mc.censored == static_cast<long long>(ens.samples));

  for (std::size_t i = 0; i < mc.grid.size(); ++i) {
    const double p_ref = std::exp(-mc.grid[i]);
    const double se_ref =
        std::sqrt(p_ref * (1.0 - p_ref) / static_cast<double>(ens.samples));
    CHECK(std::abs(mc.p1[i] - p_ref) <= 4.0 * se_ref + 1e-12);
    // Reported uncertainty is the binomial standard error of the estimate.
    const double se_hat = std::sqrt(
        mc.p1[i] * (1.0 - mc.p1[i]) / static_cast<double>(ens.samples));
    CHECK(mc.p1_stderr[i] == doctest::Approx(se_hat).epsilon(1e-12));
  }
}

TEST_CASE("factoring out the spin-independent rate is exact") {
  // k_S = k_T = 1 is pure spin-independent decay: with factor_kf the
  // reduced model has no kinetics at all, so p1 becomes the analytic
  // exponential with zero variance, and the exhaustive two-trajectory
  // ensemble reproduces the master equation deterministically.
  const SpinSystemSpec spec = one_proton_system(1.0, 0.5, 0.0, 1.0);

  McwfOptions options;
  options.t_max = 2.0;
  options.grid_dt = 0.05;
  options.ode.abs_tol = 1e-10;
  options.ode.rel_tol = 1e-10;
  options.factor_kf = true;
  options.strategy = InitialStateStrategy::Exhaustive;
  EnsembleOptions ens;
  ens.samples = 2;
  ens.master_seed = 3;
  const EnsembleResult mc = simulate_ensemble(spec, options, ens);
  CHECK(mc.factored_rate == 1.0);
  CHECK(mc.censored == 2);

  MasterEquationOptions me_opt;
  me_opt.abs_tol = 1e-10;
  me_opt.rel_tol = 1e-10;
  me_opt.grid_dt = options.grid_dt;
  const MasterEquationSeries me =
      integrate_master_equation(build_model(spec), options.t_max, me_opt);

  for (std::size_t i = 0; i < mc.grid.size(); ++i) {
    CHECK(mc.p1[i] == doctest::Approx(std::exp(-mc.grid[i])).epsilon(1e-14));
    CHECK(mc.p1_stderr[i] == 0.0);
    CHECK(std::abs(mc.ps[i] - me.ps[i]) < 1e-6);
  }
}

TEST_CASE("factored and direct ensembles agree statistically") {
  SpinSystemSpec spec = one_proton_system(1.0, 0.5, 2.0, 0.5);
  McwfOptions options;
  options.t_max = 1.0;
  options.grid_dt = 0.05;
  EnsembleOptions ens;
  ens.samples = 1500;
  ens.master_seed = 8;

  options.factor_kf = false;
  const EnsembleResult direct = simulate_ensemble(spec, options, ens);
  options.factor_kf = true;
  ens.master_seed = 9;  // independent streams
  const EnsembleResult factored = simulate_ensemble(spec, options, ens);
  CHECK(direct.factored_rate == 0.0);
  CHECK(factored.factored_rate == 0.5);

  for (std::size_t i = 0; i < direct.grid.size(); ++i) {
    const double se = std::hypot(direct.p1_stderr[i], factored.p1_stderr[i]);
    CHECK(std::abs(direct.p1[i] - factored.p1[i]) <= 5.0 * se + 1e-12);
    const double se_s = std::hypot(direct.ps_stderr[i],
                                   factored.ps_stderr[i]);
    CHECK(std::abs(direct.ps[i] - factored.ps[i]) <= 5.0 * se_s + 1e-12);
  }
}

TEST_CASE("ensembles are bitwise identical for any worker count") {
  SpinSystemSpec spec = one_proton_system(0.8, 0.3, 1.0, 0.2, 0.15);
  spec.dissipation.singlet_triplet_dephasing = 0.5;
  const ModelOperators model = build_model(spec);

  McwfOptions options;
  options.t_max = 0.5;
  options.grid_dt = 0.05;
  EnsembleOptions ens;
  ens.samples = 200;
  ens.master_seed = 77;

  ens.workers = 1;
  const EnsembleResult one = run_ensemble(model, options, ens);
  ens.workers = 8;
  const EnsembleResult eight = run_ensemble(model, options, ens);

  REQUIRE(one.grid.size() == eight.grid.size());
  for (std::size_t i = 0; i < one.grid.size(); ++i) {
    CHECK(one.p1[i] == eight.p1[i]);
    CHECK(one.ps[i] == eight.ps[i]);
    CHECK(one.p1_stderr[i] == eight.p1_stderr[i]);
    CHECK(one.ps_stderr[i] == eight.ps_stderr[i]);
  }
  CHECK(one.reaction_counts == eight.reaction_counts);
  CHECK(one.censored == eight.censored);
  CHECK(one.total_jumps == eight.total_jumps);
  CHECK(one.total_steps == eight.total_steps);
  CHECK(one.rhs_evaluations == eight.rhs_evaluations);
}

TEST_CASE("initial-state strategies agree within statistics") {
  // For spin-1/2 nuclei all three strategies sample the same maximally
  // mixed nuclear bath in expectation.
  const SpinSystemSpec spec = one_proton_system(1.0, 0.3, 1.5, 0.2);
  const ModelOperators model = build_model(spec);

  McwfOptions options;
  options.t_max = 1.0;
  options.grid_dt = 0.1;
  EnsembleOptions ens;
  ens.samples = 2000;

  options.strategy = InitialStateStrategy::SpinCoherent;
  ens.master_seed = 41;
  const EnsembleResult coherent = run_ensemble(model, options, ens);
  options.strategy = InitialStateStrategy::ZeemanRandom;
  ens.master_seed = 42;
  const EnsembleResult zeeman = run_ensemble(model, options, ens);
  options.strategy = InitialStateStrategy::Exhaustive;
  ens.master_seed = 43;
  const EnsembleResult exhaustive = run_ensemble(model, options, ens);

  auto compatible = [](const EnsembleResult& a, const EnsembleResult& b) {
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
      const double se1 = std::hypot(a.p1_stderr[i], b.p1_stderr[i]);
      CHECK(std::abs(a.p1[i] - b.p1[i]) <= 6.0 * se1 + 1e-12);
      const double ses = std::hypot(a.ps_stderr[i], b.ps_stderr[i]);
      CHECK(std::abs(a.ps[i] - b.ps[i]) <= 6.0 * ses + 1e-12);
    }
  };
  compatible(coherent, zeeman);
  compatible(coherent, exhaustive);
  compatible(zeeman, exhaustive);
}

TEST_CASE("ensemble observables satisfy the basic inequalities") {
  SpinSystemSpec spec = one_proton_system(1.0, 0.5, 2.0, 0.3, 0.1);
  const ModelOperators model = build_model(spec);
  McwfOptions options;
  options.t_max = 1.5;
  options.grid_dt = 0.05;
  EnsembleOptions ens;
  ens.samples = 500;
  ens.master_seed = 6;
  const EnsembleResult mc = run_ensemble(model, options, ens);

  CHECK(mc.p1.front() == 1.0);
  CHECK(mc.ps.front() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < mc.grid.size(); ++i) {
    CHECK(mc.p1[i] >= 0.0);
    CHECK(mc.p1[i] <= 1.0);
    if (i > 0) CHECK(mc.p1[i] <= mc.p1[i - 1]);  // survival is monotone
    CHECK(mc.ps[i] <= mc.p1[i] + 3.0 * mc.ps_stderr[i] + 1e-12);
    CHECK(mc.ps[i] >= -1e-12);
  }
  CHECK(mc.samples == ens.samples);
  CHECK(mc.master_seed == ens.master_seed);
}

TEST_CASE("trajectory failures surface with the trajectory index") {
  SpinSystemSpec spec = one_proton_system(1.0, 0.5, 1.0, 0.1);
  ModelOperators model = build_model(spec);
  // Poison the propagation matrix: every step is rejected and the
  // integrator gives up, which must abort the whole ensemble.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Index col = 0; col < model.propagation_matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(model.propagation_matrix, col); it;
         ++it) {
      it.valueRef() = Complex(nan, nan);
    }
  }

  McwfOptions options;
  options.t_max = 0.2;
  options.grid_dt = 0.1;
  EnsembleOptions ens;
  ens.samples = 3;
  CHECK_THROWS_WITH_AS(run_ensemble(model, options, ens),
                       doctest::Contains("trajectory"), Error);
}

}  // TEST_SUITE
