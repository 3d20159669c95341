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

#ifndef SPINJUMP_TYPES_HPP
#define SPINJUMP_TYPES_HPP

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace spinjump {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;  // column-major
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Triplet = Eigen::Triplet<Complex>;
using Index = Eigen::Index;

namespace constants {

// CODATA 2018 values.
inline constexpr double bohr_magneton_J_per_T = 9.2740100783e-24;
inline constexpr double hbar_J_s = 1.054571817e-34;

// mu_B / hbar expressed in rad us^-1 per mT.  Multiplying by a g-factor
// gives the electron gyromagnetic ratio in the internal unit system
// (angular frequencies in rad/us, times in us, fields in mT).
inline constexpr double gyromagnetic_per_g =
    bohr_magneton_J_per_T / hbar_J_s * 1e-9;  // = 87.94100059190184

// Default g-factor used by the bundled example configurations.
inline constexpr double default_g_factor = 2.00232;

}  // namespace constants

}  // namespace spinjump

#endif  // SPINJUMP_TYPES_HPP
