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

#ifndef SPINJUMP_MCWF_HPP
#define SPINJUMP_MCWF_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spinjump/model.hpp"
#include "spinjump/ode.hpp"
#include "spinjump/types.hpp"

namespace spinjump {

// How the nuclear part of the initial state is sampled.  The electron pair
// always starts in the singlet |S> = (|ud> - |du>)/sqrt(2).
enum class InitialStateStrategy {
  SpinCoherent,   // random spin coherent state |Omega> per nucleus
  ZeemanRandom,   // uniformly random |I, m> basis state per nucleus
  Exhaustive,     // deterministic walk through the Z nuclear basis states
};

InitialStateStrategy strategy_from_name(const std::string& name);
std::string strategy_name(InitialStateStrategy strategy);

// Deterministic random substream keyed by (master_seed, trajectory_index).
// Every random decision of a trajectory comes from its own stream, which
// makes ensembles bitwise reproducible for any worker count.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t trajectory_index);

  // Uniform double in [0, 1), using the top 53 bits of the generator.
  double uniform01();

  // Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Stable derivation of auxiliary seeds (per-repeat seeds in convergence
// studies and similar); a plain hash-combine through seed_seq.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t salt_a,
                          std::uint64_t salt_b);

struct McwfOptions {
  double t_max = 1.0;      // us
  double grid_dt = 1e-3;   // us (1 ns)
  OdeOptions ode;          // abs/rel 1e-8 by default
  InitialStateStrategy strategy = InitialStateStrategy::SpinCoherent;
  // When set and the kinetics contain a spin-independent decay component
  // c = min(k_singlet, k_triplet), the ensemble is simulated with that
  // component removed and the analytic factor e^{-c t} is multiplied back
  // into the observables.  Exact (the uniform decay commutes with
  // everything); reduces variance at late times.
  bool factor_kf = false;
};

struct JumpEvent {
  double t = 0.0;
  std::size_t channel = 0;  // index into ModelOperators::channels
  ChannelKind kind = ChannelKind::Lindblad;
};

struct TrajectoryResult {
  // Per grid point: 1 while the pair has not reacted.  A trajectory that
  // never reacts is censored at t_max and stays alive on the whole grid.
  std::vector<std::uint8_t> alive;
  // Normalized singlet expectation <phi|P_S|phi>/<phi|phi> where alive,
  // exactly 0 where not.
  std::vector<double> singlet;

  std::vector<JumpEvent> jumps;
  double reaction_time = -1.0;  // <0 when censored
  int reaction_channel = -1;

  long long steps = 0;
  long long rhs_evaluations = 0;
};

// Samples the initial state for one trajectory: singlet electrons tensored
// with the per-nucleus states of the chosen strategy.  `exhaustive_index`
// selects the nuclear basis state for Exhaustive and must be < Z (throws
// ModelError otherwise); it is ignored by the random strategies.
// Randomness is consumed in nucleus declaration order: SpinCoherent draws
// cos(theta) then phi per nucleus, ZeemanRandom draws one index per
// nucleus.
Vector sample_initial_state(const ModelOperators& model,
                            InitialStateStrategy strategy, RandomStream& rng,
                            Index exhaustive_index = 0);

// Expectation weights <phi|w_n|phi> of every jump channel (clamped to be
// non-negative), in channel order.
std::vector<double> jump_weights(const ModelOperators& model,
                                 const Vector& phi);

// Picks the channel whose cumulative weight share covers `u` (uniform in
// [0,1)).  Throws Error when all weights are <= 1e-14 (no channel open).
std::size_t select_jump_channel(const std::vector<double>& weights, double u);

struct JumpOutcome {
  std::size_t channel = 0;
  ChannelKind kind = ChannelKind::Reaction;
  Vector state;  // normalized post-jump state; empty for a reaction
};

// Samples a channel according to the weights at `phi` and applies it.
// Consumes exactly one uniform draw.
JumpOutcome select_and_apply_jump(const ModelOperators& model,
                                  const Vector& phi, RandomStream& rng);

// Propagates one trajectory from `initial` (unit norm) over [0, t_max],
// recording grid observables.  Consumes the waiting-time and jump draws
// from `rng` in order: u_1, then per jump (channel draw, next u).
// The overload without a stepper constructs one internally; the other
// reuses a caller-owned stepper (its options must match `options.ode`).
void propagate_trajectory(const ModelOperators& model,
                          const McwfOptions& options,
                          const std::vector<double>& grid,
                          const Vector& initial, RandomStream& rng,
                          TrajectoryResult& out);
void propagate_trajectory(DormandPrinceStepper& stepper,
                          const ModelOperators& model,
                          const McwfOptions& options,
                          const std::vector<double>& grid,
                          const Vector& initial, RandomStream& rng,
                          TrajectoryResult& out);

struct EnsembleOptions {
  std::size_t samples = 1000;
  unsigned workers = 1;
  std::uint64_t master_seed = 1;
};

struct EnsembleResult {
  std::vector<double> grid;
  std::vector<double> p1, p1_stderr;
  std::vector<double> ps, ps_stderr;

  std::size_t samples = 0;
  std::uint64_t master_seed = 0;
  double factored_rate = 0.0;  // analytic e^{-c t} folded in (0 if none)

  std::vector<long long> reaction_counts;  // per channel
  long long censored = 0;
  long long total_jumps = 0;
  long long total_steps = 0;
  long long rhs_evaluations = 0;
};

// Runs `samples` trajectories with deterministic per-trajectory streams
// and reduces them in trajectory-index order: the result is identical for
// any worker count.  The Exhaustive strategy cycles trajectory i through
// nuclear basis state i mod Z.
EnsembleResult run_ensemble(const ModelOperators& model,
                            const McwfOptions& options,
                            const EnsembleOptions& ensemble);

// Convenience entry point that also implements the factor_kf reduction
// (build reduced model, simulate, multiply the analytic decay back in).
EnsembleResult simulate_ensemble(const SpinSystemSpec& spec,
                                 const McwfOptions& options,
                                 const EnsembleOptions& ensemble);

}  // namespace spinjump

#endif  // SPINJUMP_MCWF_HPP
