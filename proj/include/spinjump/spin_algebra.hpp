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

#ifndef SPINJUMP_SPIN_ALGEBRA_HPP
#define SPINJUMP_SPIN_ALGEBRA_HPP

#include <cstddef>
#include <vector>

#include "spinjump/types.hpp"

namespace spinjump {

// Cartesian and ladder operators of a single spin-s site, in units of hbar.
// Basis states are ordered by descending magnetic quantum number,
// index k <-> m = s - k (so index 0 is m = +s).
struct SpinOperators {
  double spin = 0.0;
  Index dim = 0;
  SparseMatrix sx, sy, sz, sp, sm;
};

// Builds the spin matrices for quantum number `spin` (1/2, 1, 3/2, ...).
// Throws ModelError unless 2*spin is a positive integer.
SpinOperators spin_matrices(double spin);

// Sparse identity of the given dimension.
SparseMatrix sparse_identity(Index dim);

// Kronecker product, with the left factor varying slowest:
// (a ⊗ b)(i_a*rows_b + i_b, j_a*cols_b + j_b) = a(i_a,j_a) * b(i_b,j_b).
SparseMatrix kronecker(const SparseMatrix& a, const SparseMatrix& b);

// Assembles a sparse matrix from coordinate entries; duplicate coordinates
// are merged by summation.  Throws ModelError on out-of-range indices.
SparseMatrix from_coordinates(Index rows, Index cols,
                              const std::vector<Triplet>& entries);

// Embeds a single-site operator into the product space of all sites:
// I ⊗ ... ⊗ op ⊗ ... ⊗ I with `op` at position `site`.  `dims` lists the
// local dimensions in Kronecker order (left factor slowest).
SparseMatrix embed_site_operator(const SparseMatrix& op, std::size_t site,
                                 const std::vector<Index>& dims);

// Projector onto the two-electron singlet subspace of the full product
// space: P_S = 1/4 - S_a . S_b, where the electrons (spin 1/2) sit at
// positions `site_a` and `site_b` of `dims`.
SparseMatrix singlet_projector(const std::vector<Index>& dims,
                               std::size_t site_a, std::size_t site_b);

// Complement P_T = 1 - P_S, the projector onto the triplet subspace.
SparseMatrix triplet_projector(const std::vector<Index>& dims,
                               std::size_t site_a, std::size_t site_b);

// Max-norm of (a - b); convenience for tests and validation.
double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace spinjump

#endif  // SPINJUMP_SPIN_ALGEBRA_HPP
