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

#ifndef SPINJUMP_MODEL_HPP
#define SPINJUMP_MODEL_HPP

#include <array>
#include <string>
#include <vector>

#include "spinjump/types.hpp"

namespace spinjump {

// One nucleus hyperfine-coupled to one of the two radical electrons.
// The hyperfine tensor is given in mT and must be symmetric; it is
// converted to angular-frequency units with the g-factor of the electron
// the nucleus couples to.
struct NucleusSpec {
  std::string label;
  double spin = 0.5;
  int electron = 0;  // 0 or 1
  Eigen::Matrix3d hyperfine_mT = Eigen::Matrix3d::Zero();
};

// First-order recombination kinetics.  The singlet channel decays with
// k_singlet and the triplet channel with k_triplet (both us^-1).  The
// common laboratory parameterization uses a spin-selective back reaction
// k_b (singlet only) plus a spin-independent forward escape k_f:
//   k_singlet = k_b + k_f,   k_triplet = k_f.
struct KineticsSpec {
  double k_singlet = 0.0;
  double k_triplet = 0.0;

  static KineticsSpec from_recombination(double k_b, double k_f) {
    return KineticsSpec{k_b + k_f, k_f};
  }
};

// Incoherent spin relaxation/dephasing channels (rates in us^-1):
//  - random_field[e]: isotropic random-field relaxation acting on electron
//    e through the three Lindblad operators sqrt(gamma) * S_{e,x/y/z};
//  - singlet_triplet_dephasing: damping of singlet-triplet coherences,
//    realized by the single Lindblad operator sqrt(2*gamma) * P_S.
struct DissipationSpec {
  std::array<double, 2> random_field = {0.0, 0.0};
  double singlet_triplet_dephasing = 0.0;
};

// Full specification of a radical pair: two spin-1/2 electrons, a static
// external field, an arbitrary set of hyperfine-coupled nuclei, reaction
// kinetics and optional dissipation.
struct SpinSystemSpec {
  std::array<double, 2> g = {constants::default_g_factor,
                             constants::default_g_factor};
  Eigen::Vector3d field_mT = Eigen::Vector3d::Zero();
  std::vector<NucleusSpec> nuclei;
  KineticsSpec kinetics;
  DissipationSpec dissipation;

  // Throws ModelError if any entry is out of range.
  void validate() const;

  // Number of nuclear basis states Z and the total dimension 4*Z.
  Index nuclear_multiplicity() const;
  Index dimension() const;
};

// Kronecker ordering of the composite Hilbert space: electron 1, electron
// 2, then the nuclei in declaration order, with the left factor varying
// slowest.  Within each site, basis states are ordered by descending m.
struct SiteLayout {
  std::vector<Index> dims;
  std::vector<double> spins;
};

enum class ChannelKind {
  Reaction,  // trajectory leaves the spin space; no post-jump state
  Lindblad,  // state is replaced by the normalized image under `op`
};

// One stochastic jump channel.  The probability of this channel firing in
// a short interval dt is dt * <phi|weight|phi> / <phi|phi>.  For Lindblad
// channels weight = J^dag J with J = `op`; for reaction channels weight is
// the rate-weighted projector itself and `op` is empty.
struct JumpChannel {
  ChannelKind kind = ChannelKind::Lindblad;
  std::string label;
  double rate = 0.0;
  SparseMatrix op;
  SparseMatrix weight;
};

// All operators needed by both the trajectory and the density-matrix
// propagators, in the internal unit system (rad/us, us^-1).
struct ModelOperators {
  SiteLayout layout;
  Index dim = 0;
  Index nuclear_multiplicity = 1;

  SparseMatrix hamiltonian;    // Hermitian, rad/us
  SparseMatrix p_singlet;
  SparseMatrix p_triplet;

  std::vector<JumpChannel> channels;  // reaction channels first

  // H_eff = H - (i/2) * sum_n weight_n.  The norm of a jump-free
  // trajectory evolving under H_eff decays with the total loss rate.
  SparseMatrix effective_hamiltonian;

  // A = -i * H_eff; the right-hand side applied by the integrators.
  SparseMatrix propagation_matrix;
};

// Builds every operator for `spec`.  Throws ModelError on invalid input.
ModelOperators build_model(const SpinSystemSpec& spec);

// Expectation value <phi|op|phi> (not normalized).  Real part only; the
// operators used here are Hermitian.
double real_expectation(const SparseMatrix& op, const Vector& phi);

}  // namespace spinjump

#endif  // SPINJUMP_MODEL_HPP
