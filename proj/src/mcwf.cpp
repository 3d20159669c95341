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

#include "spinjump/mcwf.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include "spinjump/errors.hpp"

namespace spinjump {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Trajectories are dealt out in fixed-size chunks and the chunk partial
// sums are folded in chunk order, so the reduction is identical for any
// worker count.  The chunk size is part of the reproducibility contract
// only in the sense that it must not depend on the worker count.
constexpr std::size_t kChunkSize = 64;

// y = A x for a compressed column-major sparse matrix.  This is the inner
// loop of every trajectory; a raw pointer walk keeps it allocation-free.
inline void apply_sparse(const SparseMatrix& a, const Vector& x, Vector& out) {
  out.setZero();
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const Complex* vals = a.valuePtr();
  const Index cols = a.outerSize();
  for (Index j = 0; j < cols; ++j) {
    const Complex xj = x[j];
    if (xj == Complex(0.0, 0.0)) continue;
    const Index end = outer[j + 1];
    for (Index p = outer[j]; p < end; ++p) {
      out[inner[p]] += vals[p] * xj;
    }
  }
}

double binomial_coefficient(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) {
    acc *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return acc;
}

// Dense Kronecker product of two state vectors (left factor slowest).
Vector kron_vector(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a[i] * b;
  }
  return out;
}

}  // namespace

InitialStateStrategy strategy_from_name(const std::string& name) {
  if (name == "spin_coherent") return InitialStateStrategy::SpinCoherent;
  if (name == "zeeman_random") return InitialStateStrategy::ZeemanRandom;
  if (name == "exhaustive") return InitialStateStrategy::Exhaustive;
  throw Error("unknown initial-state strategy '" + name +
              "' (expected spin_coherent, zeeman_random or exhaustive)");
}

std::string strategy_name(InitialStateStrategy strategy) {
  switch (strategy) {
    case InitialStateStrategy::SpinCoherent:
      return "spin_coherent";
    case InitialStateStrategy::ZeemanRandom:
      return "zeeman_random";
    case InitialStateStrategy::Exhaustive:
      return "exhaustive";
  }
  return "unknown";
}

RandomStream::RandomStream(std::uint64_t master_seed,
                           std::uint64_t trajectory_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trajectory_index & 0xffffffffu),
                    static_cast<std::uint32_t>(trajectory_index >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform01() {
  // 53 random bits into [0, 1); bit-for-bit portable.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw Error("uniform_below(0) is undefined");
  const std::uint64_t limit = (0 - n) % n;  // 2^64 mod n
  std::uint64_t r;
  do {
    r = engine_();
  } while (r < limit);
  return r % n;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t salt_a,
                          std::uint64_t salt_b) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(salt_a & 0xffffffffu),
                    static_cast<std::uint32_t>(salt_a >> 32),
                    static_cast<std::uint32_t>(salt_b & 0xffffffffu),
                    static_cast<std::uint32_t>(salt_b >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

Vector sample_initial_state(const ModelOperators& model,
                            InitialStateStrategy strategy, RandomStream& rng,
                            Index exhaustive_index) {
  const auto& layout = model.layout;
  const Index z = model.nuclear_multiplicity;

  Vector nuclear;
  switch (strategy) {
    case InitialStateStrategy::SpinCoherent: {
      nuclear.resize(1);
      nuclear[0] = Complex(1.0, 0.0);
      for (std::size_t site = 2; site < layout.dims.size(); ++site) {
        const Index d = layout.dims[site];
        const int two_i = static_cast<int>(d) - 1;
        // Direction uniform on the sphere: cos(theta) ~ U[-1,1],
        // azimuth ~ U[0,2pi).  Drawn in this order, per nucleus.
        const double cos_theta = 2.0 * rng.uniform01() - 1.0;
        const double azimuth = 2.0 * kPi * rng.uniform01();
        const double half = 0.5 * std::acos(std::clamp(cos_theta, -1.0, 1.0));
        const double c = std::cos(half);
        const double s = std::sin(half);
        Vector chi(d);
        for (int k = 0; k <= two_i; ++k) {
          // Amplitude on |I, I-k>: rotation of the maximal-projection
          // state toward (theta, azimuth).
          const double mag = std::sqrt(binomial_coefficient(two_i, k)) *
                             std::pow(c, two_i - k) * std::pow(s, k);
          chi[k] = std::polar(mag, static_cast<double>(k) * azimuth);
        }
        nuclear = kron_vector(nuclear, chi);
      }
      break;
    }
    case InitialStateStrategy::ZeemanRandom: {
      Index basis = 0;
      for (std::size_t site = 2; site < layout.dims.size(); ++site) {
        const Index d = layout.dims[site];
        basis = basis * d + static_cast<Index>(
                                rng.uniform_below(static_cast<std::uint64_t>(d)));
      }
      nuclear = Vector::Zero(z);
      nuclear[basis] = Complex(1.0, 0.0);
      break;
    }
    case InitialStateStrategy::Exhaustive: {
      if (exhaustive_index < 0 || exhaustive_index >= z) {
        throw ModelError("exhaustive enumeration exhausted: index " +
                         std::to_string(exhaustive_index) + " of " +
                         std::to_string(z) + " nuclear basis states");
      }
      nuclear = Vector::Zero(z);
      nuclear[exhaustive_index] = Complex(1.0, 0.0);
      break;
    }
  }

  // |S> ⊗ |nuclear>: with basis states ordered m = +1/2 before -1/2, the
  // electron-pair indices of |ud> and |du> are 1 and 2.
  Vector phi = Vector::Zero(model.dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index zi = 0; zi < z; ++zi) {
    phi[1 * z + zi] = inv_sqrt2 * nuclear[zi];
    phi[2 * z + zi] = -inv_sqrt2 * nuclear[zi];
  }
  return phi;
}

std::vector<double> jump_weights(const ModelOperators& model,
                                 const Vector& phi) {
  std::vector<double> weights(model.channels.size());
  for (std::size_t n = 0; n < model.channels.size(); ++n) {
    weights[n] = std::max(0.0, real_expectation(model.channels[n].weight, phi));
  }
  return weights;
}

std::size_t select_jump_channel(const std::vector<double>& weights, double u) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 1e-14)) {
    throw Error("degenerate jump: no channel open (total weight " +
                std::to_string(total) + ")");
  }
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last_open = weights.size();
  for (std::size_t n = 0; n < weights.size(); ++n) {
    if (weights[n] <= 0.0) continue;
    last_open = n;
    cumulative += weights[n];
    if (target < cumulative) return n;
  }
  return last_open;  // guards the u ~ 1 rounding edge
}

JumpOutcome select_and_apply_jump(const ModelOperators& model,
                                  const Vector& phi, RandomStream& rng) {
  const std::vector<double> weights = jump_weights(model, phi);
  const std::size_t channel = select_jump_channel(weights, rng.uniform01());
  const JumpChannel& ch = model.channels[channel];

  JumpOutcome outcome;
  outcome.channel = channel;
  outcome.kind = ch.kind;
  if (ch.kind == ChannelKind::Lindblad) {
    Vector jumped(phi.size());
    apply_sparse(ch.op, phi, jumped);
    const double norm = jumped.norm();
    if (!(norm > 0.0)) {
      throw Error("degenerate jump: selected channel '" + ch.label +
                  "' annihilates the state");
    }
    outcome.state = jumped / norm;
  }
  return outcome;
}

namespace {

// Shared trajectory loop.  Records grid observables from the dense
// interpolant; grid points with t <= t_jump are attributed to the
// pre-jump state (the post-jump state applies strictly after the jump).
void propagate_impl(DormandPrinceStepper& stepper, const ModelOperators& model,
                    const McwfOptions& options, const std::vector<double>& grid,
                    const Vector& initial, RandomStream& rng,
                    TrajectoryResult& out) {
  const std::size_t n_grid = grid.size();
  out.alive.assign(n_grid, 0);
  out.singlet.assign(n_grid, 0.0);
  out.jumps.clear();
  out.reaction_time = -1.0;
  out.reaction_channel = -1;

  const long long steps0 = stepper.steps_accepted();
  const long long nfev0 = stepper.rhs_evaluations();

  Vector scratch(model.dim);
  const auto record_state = [&](std::size_t g, const Vector& state) {
    const double n2 = state.squaredNorm();
    out.alive[g] = 1;
    out.singlet[g] =
        n2 > 0.0 ? real_expectation(model.p_singlet, state) / n2 : 0.0;
  };

  record_state(0, initial);
  std::size_t next_grid = 1;

  stepper.reset(0.0, initial);
  double u = rng.uniform01();

  DenseSegment segment;
  bool reacted = false;
  while (!reacted && stepper.step(options.t_max, segment)) {
    const double norm2_end = stepper.state().squaredNorm();
    if (norm2_end < u) {
      const NormCrossing crossing = refine_norm_crossing(segment, u);
      while (next_grid < n_grid && grid[next_grid] <= crossing.t) {
        segment.evaluate(grid[next_grid], scratch);
        record_state(next_grid, scratch);
        ++next_grid;
      }
      const JumpOutcome outcome =
          select_and_apply_jump(model, crossing.state, rng);
      out.jumps.push_back(JumpEvent{crossing.t, outcome.channel, outcome.kind});
      if (outcome.kind == ChannelKind::Reaction) {
        reacted = true;
        out.reaction_time = crossing.t;
        out.reaction_channel = static_cast<int>(outcome.channel);
      } else {
        stepper.reset(crossing.t, outcome.state);
        u = rng.uniform01();  // memoryless restart after the jump
      }
    } else {
      while (next_grid < n_grid && grid[next_grid] <= segment.t_end()) {
        segment.evaluate(grid[next_grid], scratch);
        record_state(next_grid, scratch);
        ++next_grid;
      }
    }
  }
  // Censored trajectories have been recorded alive on the full grid: the
  // final segment ends exactly at t_max.  The loop below only fires in
  // the pathological case of a jump landing within the step-underflow
  // floor of t_max, where the last sliver is absorbed without a segment.
  if (!reacted) {
    while (next_grid < n_grid) {
      record_state(next_grid, stepper.state());
      ++next_grid;
    }
  }

  out.steps = stepper.steps_accepted() - steps0;
  out.rhs_evaluations = stepper.rhs_evaluations() - nfev0;
}

RhsFunction make_trajectory_rhs(const ModelOperators& model) {
  const SparseMatrix* a = &model.propagation_matrix;
  return [a](double, const Vector& y, Vector& dydt) {
    apply_sparse(*a, y, dydt);
  };
}

}  // namespace

void propagate_trajectory(DormandPrinceStepper& stepper,
                          const ModelOperators& model,
                          const McwfOptions& options,
                          const std::vector<double>& grid,
                          const Vector& initial, RandomStream& rng,
                          TrajectoryResult& out) {
  propagate_impl(stepper, model, options, grid, initial, rng, out);
}

void propagate_trajectory(const ModelOperators& model,
                          const McwfOptions& options,
                          const std::vector<double>& grid,
                          const Vector& initial, RandomStream& rng,
                          TrajectoryResult& out) {
  DormandPrinceStepper stepper(make_trajectory_rhs(model), model.dim,
                               options.ode);
  propagate_impl(stepper, model, options, grid, initial, rng, out);
}

namespace {

struct ChunkPartial {
  std::vector<long long> alive;
  std::vector<double> singlet_sum;
  std::vector<double> singlet_sumsq;
  std::vector<long long> reaction_counts;
  long long censored = 0;
  long long jumps = 0;
  long long steps = 0;
  long long rhs_evaluations = 0;

  ChunkPartial(std::size_t n_grid, std::size_t n_channels)
      : alive(n_grid, 0),
        singlet_sum(n_grid, 0.0),
        singlet_sumsq(n_grid, 0.0),
        reaction_counts(n_channels, 0) {}

  void fold(const ChunkPartial& other) {
    for (std::size_t g = 0; g < alive.size(); ++g) {
      alive[g] += other.alive[g];
      singlet_sum[g] += other.singlet_sum[g];
      singlet_sumsq[g] += other.singlet_sumsq[g];
    }
    for (std::size_t c = 0; c < reaction_counts.size(); ++c) {
      reaction_counts[c] += other.reaction_counts[c];
    }
    censored += other.censored;
    jumps += other.jumps;
    steps += other.steps;
    rhs_evaluations += other.rhs_evaluations;
  }
};

}  // namespace

EnsembleResult run_ensemble(const ModelOperators& model,
                            const McwfOptions& options,
                            const EnsembleOptions& ensemble) {
  if (ensemble.samples < 1) throw Error("ensemble needs at least one sample");
  const unsigned workers = std::max(1u, ensemble.workers);
  const std::vector<double> grid = make_time_grid(options.t_max, options.grid_dt);
  const std::size_t n_grid = grid.size();
  const std::size_t n_channels = model.channels.size();
  const std::size_t n_samples = ensemble.samples;
  const std::size_t n_chunks = (n_samples + kChunkSize - 1) / kChunkSize;

  // Ordered reduction: chunk partials are folded strictly in chunk order.
  std::mutex mutex;
  std::condition_variable cv;
  std::map<std::size_t, ChunkPartial> pending;
  std::size_t next_fold = 0;
  const std::size_t max_pending = 4 * static_cast<std::size_t>(workers) + 8;
  ChunkPartial total(n_grid, n_channels);

  std::atomic<std::size_t> next_chunk{0};
  std::atomic<bool> failed{false};
  std::string failure_message;

  const auto worker_main = [&]() {
    DormandPrinceStepper stepper(make_trajectory_rhs(model), model.dim,
                                 options.ode);
    TrajectoryResult traj;
    for (;;) {
      const std::size_t chunk = next_chunk.fetch_add(1);
      if (chunk >= n_chunks || failed.load()) break;
      const std::size_t begin = chunk * kChunkSize;
      const std::size_t end = std::min(begin + kChunkSize, n_samples);

      ChunkPartial part(n_grid, n_channels);
      for (std::size_t i = begin; i < end && !failed.load(); ++i) {
        try {
          RandomStream rng(ensemble.master_seed, i);
          const Vector phi0 = sample_initial_state(
              model, options.strategy, rng,
              static_cast<Index>(i % static_cast<std::size_t>(
                                         model.nuclear_multiplicity)));
          propagate_impl(stepper, model, options, grid, phi0, rng, traj);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(mutex);
          if (!failed.exchange(true)) {
            failure_message =
                "trajectory " + std::to_string(i) + ": " + e.what();
          }
          cv.notify_all();
          break;
        }
        for (std::size_t g = 0; g < n_grid; ++g) {
          if (traj.alive[g]) {
            part.alive[g] += 1;
            const double s = traj.singlet[g];
            part.singlet_sum[g] += s;
            part.singlet_sumsq[g] += s * s;
          }
        }
        if (traj.reaction_channel >= 0) {
          part.reaction_counts[static_cast<std::size_t>(
              traj.reaction_channel)] += 1;
        } else {
          part.censored += 1;
        }
        part.jumps += static_cast<long long>(traj.jumps.size());
        part.steps += traj.steps;
        part.rhs_evaluations += traj.rhs_evaluations;
      }

      std::unique_lock<std::mutex> lock(mutex);
      cv.wait(lock, [&] {
        return failed.load() || chunk <= next_fold + max_pending;
      });
      if (failed.load()) break;
      pending.emplace(chunk, std::move(part));
      while (!pending.empty() && pending.begin()->first == next_fold) {
        total.fold(pending.begin()->second);
        pending.erase(pending.begin());
        ++next_fold;
      }
      cv.notify_all();
    }
  };

  if (workers == 1) {
    worker_main();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_main);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw Error("ensemble aborted: " + failure_message);
  if (next_fold != n_chunks) throw Error("ensemble reduction incomplete");

  EnsembleResult result;
  result.grid = grid;
  result.samples = n_samples;
  result.master_seed = ensemble.master_seed;
  result.p1.resize(n_grid);
  result.p1_stderr.resize(n_grid);
  result.ps.resize(n_grid);
  result.ps_stderr.resize(n_grid);
  const double n = static_cast<double>(n_samples);
  for (std::size_t g = 0; g < n_grid; ++g) {
    const double p = static_cast<double>(total.alive[g]) / n;
    result.p1[g] = p;
    result.p1_stderr[g] = std::sqrt(std::max(0.0, p * (1.0 - p) / n));
    const double mean = total.singlet_sum[g] / n;
    result.ps[g] = mean;
    if (n_samples > 1) {
      const double var =
          std::max(0.0, (total.singlet_sumsq[g] -
                         total.singlet_sum[g] * total.singlet_sum[g] / n) /
                            (n - 1.0));
      result.ps_stderr[g] = std::sqrt(var / n);
    } else {
      result.ps_stderr[g] = 0.0;
    }
  }
  result.reaction_counts = total.reaction_counts;
  result.censored = total.censored;
  result.total_jumps = total.jumps;
  result.total_steps = total.steps;
  result.rhs_evaluations = total.rhs_evaluations;
  return result;
}

EnsembleResult simulate_ensemble(const SpinSystemSpec& spec,
                                 const McwfOptions& options,
                                 const EnsembleOptions& ensemble) {
  const double common_decay =
      std::min(spec.kinetics.k_singlet, spec.kinetics.k_triplet);
  if (options.factor_kf && common_decay > 0.0) {
    SpinSystemSpec reduced = spec;
    reduced.kinetics.k_singlet -= common_decay;
    reduced.kinetics.k_triplet -= common_decay;
    const ModelOperators model = build_model(reduced);
    McwfOptions reduced_options = options;
    reduced_options.factor_kf = false;
    EnsembleResult result = run_ensemble(model, reduced_options, ensemble);
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
      const double decay = std::exp(-common_decay * result.grid[g]);
      result.p1[g] *= decay;
      result.p1_stderr[g] *= decay;
      result.ps[g] *= decay;
      result.ps_stderr[g] *= decay;
    }
    result.factored_rate = common_decay;
    return result;
  }
  const ModelOperators model = build_model(spec);
  return run_ensemble(model, options, ensemble);
}

}  // namespace spinjump
