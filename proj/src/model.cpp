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

#include "spinjump/model.hpp"

#include <cmath>
#include <string>

#include "spinjump/errors.hpp"
#include "spinjump/spin_algebra.hpp"

namespace spinjump {

namespace {

constexpr double kHyperfineSymmetryTolerance_mT = 1e-9;

void check_rate(double value, const std::string& name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ModelError(name + " must be a finite non-negative rate, got " +
                     std::to_string(value));
  }
}

}  // namespace

void SpinSystemSpec::validate() const {
  for (int e = 0; e < 2; ++e) {
    if (!(g[e] > 0.0) || !std::isfinite(g[e])) {
      throw ModelError("electron g-factor must be positive and finite");
    }
  }
  if (!field_mT.allFinite()) {
    throw ModelError("magnetic field components must be finite");
  }
  for (const auto& nuc : nuclei) {
    const double doubled = 2.0 * nuc.spin;
    if (!(nuc.spin > 0.0) ||
        std::abs(doubled - std::round(doubled)) > 1e-12) {
      throw ModelError("nucleus '" + nuc.label +
                       "': spin must be a positive multiple of 1/2");
    }
    if (nuc.electron != 0 && nuc.electron != 1) {
      throw ModelError("nucleus '" + nuc.label +
                       "': electron index must be 0 or 1");
    }
    if (!nuc.hyperfine_mT.allFinite()) {
      throw ModelError("nucleus '" + nuc.label +
                       "': hyperfine tensor must be finite");
    }
    const double asym =
        (nuc.hyperfine_mT - nuc.hyperfine_mT.transpose()).cwiseAbs().maxCoeff();
    if (asym > kHyperfineSymmetryTolerance_mT) {
      throw ModelError("nucleus '" + nuc.label +
                       "': hyperfine tensor must be symmetric (asymmetry " +
                       std::to_string(asym) + " mT)");
    }
  }
  check_rate(kinetics.k_singlet, "k_singlet");
  check_rate(kinetics.k_triplet, "k_triplet");
  check_rate(dissipation.random_field[0], "random_field rate (electron 1)");
  check_rate(dissipation.random_field[1], "random_field rate (electron 2)");
  check_rate(dissipation.singlet_triplet_dephasing,
             "singlet_triplet_dephasing rate");
}

Index SpinSystemSpec::nuclear_multiplicity() const {
  Index z = 1;
  for (const auto& nuc : nuclei) {
    z *= static_cast<Index>(std::lround(2.0 * nuc.spin)) + 1;
  }
  return z;
}

Index SpinSystemSpec::dimension() const { return 4 * nuclear_multiplicity(); }

double real_expectation(const SparseMatrix& op, const Vector& phi) {
  Complex acc(0.0, 0.0);
  for (int j = 0; j < op.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(op, j); it; ++it) {
      acc += std::conj(phi[it.row()]) * it.value() * phi[it.col()];
    }
  }
  return acc.real();
}

ModelOperators build_model(const SpinSystemSpec& spec) {
  spec.validate();

  ModelOperators model;
  auto& layout = model.layout;
  layout.dims = {2, 2};
  layout.spins = {0.5, 0.5};
  for (const auto& nuc : spec.nuclei) {
    layout.dims.push_back(static_cast<Index>(std::lround(2.0 * nuc.spin)) + 1);
    layout.spins.push_back(nuc.spin);
  }
  model.dim = spec.dimension();
  model.nuclear_multiplicity = spec.nuclear_multiplicity();

  const SpinOperators half = spin_matrices(0.5);
  const SparseMatrix electron_axes[3] = {half.sx, half.sy, half.sz};

  // Zeeman terms: omega_e = g_e * (mu_B/hbar) * B, in rad/us with B in mT.
  SparseMatrix h(model.dim, model.dim);
  std::array<std::array<SparseMatrix, 3>, 2> electron_ops;
  for (int e = 0; e < 2; ++e) {
    const double gyro = spec.g[e] * constants::gyromagnetic_per_g;
    for (int a = 0; a < 3; ++a) {
      electron_ops[e][a] =
          embed_site_operator(electron_axes[a], static_cast<std::size_t>(e),
                              layout.dims);
      const double b = spec.field_mT[a];
      if (b != 0.0) {
        h = h + SparseMatrix(electron_ops[e][a] * Complex(gyro * b, 0.0));
      }
    }
  }

  // Hyperfine terms: S_e . A_i . I_i, with A_i converted from mT using the
  // g-factor of the coupled electron.
  for (std::size_t i = 0; i < spec.nuclei.size(); ++i) {
    const auto& nuc = spec.nuclei[i];
    const double gyro = spec.g[nuc.electron] * constants::gyromagnetic_per_g;
    const SpinOperators nuc_ops = spin_matrices(nuc.spin);
    const SparseMatrix nuc_axes[3] = {nuc_ops.sx, nuc_ops.sy, nuc_ops.sz};
    const std::size_t site = 2 + i;
    std::array<SparseMatrix, 3> embedded;
    std::array<bool, 3> needed = {false, false, false};
    for (int b = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a) {
        if (nuc.hyperfine_mT(a, b) != 0.0) needed[b] = true;
      }
      if (needed[b]) {
        embedded[b] = embed_site_operator(nuc_axes[b], site, layout.dims);
      }
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double coupling = gyro * nuc.hyperfine_mT(a, b);
        if (coupling == 0.0) continue;
        h = h + SparseMatrix(electron_ops[nuc.electron][a] * embedded[b] *
                             Complex(coupling, 0.0));
      }
    }
  }
  h.prune([](Index, Index, const Complex& v) { return std::abs(v) > 0.0; });
  h.makeCompressed();
  model.hamiltonian = h;

  model.p_singlet = singlet_projector(layout.dims, 0, 1);
  model.p_triplet = triplet_projector(layout.dims, 0, 1);

  // Reaction channels.  The weights are the rate-scaled projectors whose
  // expectation values set the jump probabilities.
  if (spec.kinetics.k_singlet > 0.0) {
    JumpChannel ch;
    ch.kind = ChannelKind::Reaction;
    ch.label = "reaction_singlet";
    ch.rate = spec.kinetics.k_singlet;
    ch.weight = model.p_singlet * Complex(spec.kinetics.k_singlet, 0.0);
    model.channels.push_back(std::move(ch));
  }
  if (spec.kinetics.k_triplet > 0.0) {
    JumpChannel ch;
    ch.kind = ChannelKind::Reaction;
    ch.label = "reaction_triplet";
    ch.rate = spec.kinetics.k_triplet;
    ch.weight = model.p_triplet * Complex(spec.kinetics.k_triplet, 0.0);
    model.channels.push_back(std::move(ch));
  }

  // Random-field relaxation: three Lindblad operators per electron.
  static const char* axis_names[3] = {"x", "y", "z"};
  for (int e = 0; e < 2; ++e) {
    const double gamma = spec.dissipation.random_field[e];
    if (gamma <= 0.0) continue;
    for (int a = 0; a < 3; ++a) {
      JumpChannel ch;
      ch.kind = ChannelKind::Lindblad;
      ch.label = "random_field_e" + std::to_string(e + 1) + "_" + axis_names[a];
      ch.rate = gamma;
      ch.op = electron_ops[e][a] * Complex(std::sqrt(gamma), 0.0);
      ch.weight = SparseMatrix(ch.op.adjoint() * ch.op);
      model.channels.push_back(std::move(ch));
    }
  }

  // Singlet-triplet dephasing as a single Lindblad operator.  The rate
  // convention is chosen so that the singlet-triplet coherences of the
  // density matrix decay with exactly `singlet_triplet_dephasing`.
  if (spec.dissipation.singlet_triplet_dephasing > 0.0) {
    const double gamma = spec.dissipation.singlet_triplet_dephasing;
    JumpChannel ch;
    ch.kind = ChannelKind::Lindblad;
    ch.label = "st_dephasing";
    ch.rate = gamma;
    ch.op = model.p_singlet * Complex(std::sqrt(2.0 * gamma), 0.0);
    ch.weight = SparseMatrix(ch.op.adjoint() * ch.op);
    model.channels.push_back(std::move(ch));
  }

  // The trajectory inner loops walk raw compressed-storage pointers.
  for (auto& ch : model.channels) {
    if (ch.op.size() > 0) ch.op.makeCompressed();
    ch.weight.makeCompressed();
  }

  // H_eff = H - (i/2) sum_n weight_n and the propagator A = -i H_eff.
  SparseMatrix loss(model.dim, model.dim);
  for (const auto& ch : model.channels) loss = loss + ch.weight;
  model.effective_hamiltonian = h + SparseMatrix(loss * Complex(0.0, -0.5));
  model.propagation_matrix =
      SparseMatrix(h * Complex(0.0, -1.0)) - SparseMatrix(loss * Complex(0.5, 0.0));
  model.effective_hamiltonian.makeCompressed();
  model.propagation_matrix.makeCompressed();
  return model;
}

}  // namespace spinjump
