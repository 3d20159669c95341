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

#ifndef SPINJUMP_TESTS_TEST_HELPERS_HPP
#define SPINJUMP_TESTS_TEST_HELPERS_HPP

#include <random>

#include "spinjump/model.hpp"
#include "spinjump/types.hpp"

namespace spinjump::testing {

inline DenseMatrix dense(const SparseMatrix& m) { return DenseMatrix(m); }

inline double max_abs(const DenseMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

// Deterministic pseudo-random unit vector (independent of the engine the
// simulator itself uses).
inline Vector random_state(Index dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = Complex(n(gen), n(gen));
  v /= v.norm();
  return v;
}

inline DenseMatrix random_hermitian(Index dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  DenseMatrix a(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c) a(r, c) = Complex(n(gen), n(gen));
  }
  return 0.5 * (a + a.adjoint().eval());
}

// The workhorse test system: one proton on electron 1 with an isotropic
// coupling, field along z.
inline SpinSystemSpec one_proton_system(double a_iso_mT, double b_z_mT,
                                        double k_b, double k_f,
                                        double gamma_rf = 0.0) {
  SpinSystemSpec spec;
  spec.field_mT = Eigen::Vector3d(0.0, 0.0, b_z_mT);
  NucleusSpec proton;
  proton.label = "H1";
  proton.spin = 0.5;
  proton.electron = 0;
  proton.hyperfine_mT = a_iso_mT * Eigen::Matrix3d::Identity();
  spec.nuclei.push_back(proton);
  spec.kinetics = KineticsSpec::from_recombination(k_b, k_f);
  spec.dissipation.random_field = {gamma_rf, gamma_rf};
  return spec;
}

inline SpinSystemSpec bare_pair(double k_singlet, double k_triplet) {
  SpinSystemSpec spec;
  spec.kinetics.k_singlet = k_singlet;
  spec.kinetics.k_triplet = k_triplet;
  return spec;
}

}  // namespace spinjump::testing

#endif  // SPINJUMP_TESTS_TEST_HELPERS_HPP
