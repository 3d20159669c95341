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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_helpers.hpp"

#include "spinjump/errors.hpp"
#include "spinjump/spin_algebra.hpp"
#include "spinjump/types.hpp"

using namespace spinjump;
using testing::dense;
using testing::max_abs;

namespace {

const Complex kI(0.0, 1.0);

}  // namespace

TEST_SUITE("spin_algebra") {

TEST_CASE("su(2) commutators and Casimir for low spins") {
  for (double s : {0.5, 1.0, 1.5, 2.5}) {
    const SpinOperators op = spin_matrices(s);
    REQUIRE(op.dim == static_cast<Index>(std::lround(2 * s + 1)));

    const DenseMatrix sx = dense(op.sx), sy = dense(op.sy), sz = dense(op.sz);
    CHECK(max_abs(sx * sy - sy * sx - kI * sz) < 1e-14);
    CHECK(max_abs(sy * sz - sz * sy - kI * sx) < 1e-14);
    CHECK(max_abs(sz * sx - sx * sz - kI * sy) < 1e-14);

    const DenseMatrix casimir = sx * sx + sy * sy + sz * sz;
    const DenseMatrix expected =
        s * (s + 1.0) * DenseMatrix::Identity(op.dim, op.dim);
    CHECK(max_abs(casimir - expected) < 1e-13);

    // Hermiticity and ladder adjointness.
    CHECK(max_abs(sx - sx.adjoint().eval()) < 1e-15);
    CHECK(max_abs(sy - sy.adjoint().eval()) < 1e-15);
    CHECK(max_abs(dense(op.sp) - dense(op.sm).adjoint().eval()) < 1e-15);
  }
}

TEST_CASE("basis ordering is descending m and ladder elements match") {
  const SpinOperators op = spin_matrices(1.0);
  const DenseMatrix sz = dense(op.sz);
  CHECK(sz(0, 0) == Complex(1.0, 0.0));
  CHECK(sz(1, 1) == Complex(0.0, 0.0));
  CHECK(sz(2, 2) == Complex(-1.0, 0.0));

  // <m+1|S+|m> = sqrt(s(s+1) - m(m+1)); with index k = s - m the entry
  // sits at (k-1, k).
  const DenseMatrix sp = dense(op.sp);
  CHECK(std::abs(sp(0, 1) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(sp(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(sp(0, 2)) == 0.0);
  CHECK(std::abs(sp(1, 0)) == 0.0);

  const SpinOperators half = spin_matrices(0.5);
  CHECK(std::abs(dense(half.sp)(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(dense(half.sx)(0, 1) - 0.5) < 1e-15);
}

TEST_CASE("invalid spin quantum numbers are rejected") {
  CHECK_THROWS_AS(spin_matrices(0.0), ModelError);
  CHECK_THROWS_AS(spin_matrices(-0.5), ModelError);
  CHECK_THROWS_AS(spin_matrices(0.3), ModelError);
}

TEST_CASE("kronecker product layout and values") {
  const SpinOperators half = spin_matrices(0.5);
  const SparseMatrix id2 = sparse_identity(2);

  // sz (x) id: left factor varies slowest.
  const DenseMatrix a = dense(kronecker(half.sz, id2));
  DenseMatrix expected(4, 4);
  expected.setZero();
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.5;
  expected(2, 2) = -0.5;
  expected(3, 3) = -0.5;
  CHECK(max_abs(a - expected) == 0.0);

  // Mixed product rule (A (x) B)(C (x) D) = AC (x) BD.
  const DenseMatrix lhs =
      dense(kronecker(half.sx, half.sy)) * dense(kronecker(half.sz, half.sp));
  const DenseMatrix rhs = dense(kronecker(
      SparseMatrix((half.sx * half.sz).eval()),
      SparseMatrix((half.sy * half.sp).eval())));
  CHECK(max_abs(lhs - rhs) < 1e-15);

  CHECK(max_abs(dense(kronecker(id2, id2)) -
                DenseMatrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("from_coordinates merges duplicates and bounds-checks") {
  std::vector<Triplet> entries;
  entries.emplace_back(0, 1, Complex(1.0, 0.0));
  entries.emplace_back(0, 1, Complex(0.0, 2.0));  // duplicate coordinate
  entries.emplace_back(2, 2, Complex(-1.0, 0.0));
  const SparseMatrix m = from_coordinates(3, 3, entries);
  const DenseMatrix d = dense(m);
  CHECK(d(0, 1) == Complex(1.0, 2.0));
  CHECK(d(2, 2) == Complex(-1.0, 0.0));

  std::vector<Triplet> bad;
  bad.emplace_back(3, 0, Complex(1.0, 0.0));
  CHECK_THROWS_AS(from_coordinates(3, 3, bad), ModelError);
  std::vector<Triplet> bad_col;
  bad_col.emplace_back(0, 5, Complex(1.0, 0.0));
  CHECK_THROWS_AS(from_coordinates(3, 3, bad_col), ModelError);
}

TEST_CASE("embed_site_operator equals the explicit Kronecker chain") {
  const SpinOperators half = spin_matrices(0.5);
  const SpinOperators one = spin_matrices(1.0);
  const std::vector<Index> dims = {2, 3, 2};

  const SparseMatrix embedded = embed_site_operator(one.sy, 1, dims);
  const SparseMatrix explicit_chain =
      kronecker(sparse_identity(2), kronecker(one.sy, sparse_identity(2)));
  CHECK(max_abs_difference(embedded, explicit_chain) < 1e-15);

  const SparseMatrix first = embed_site_operator(half.sx, 0, dims);
  const SparseMatrix first_explicit =
      kronecker(half.sx, sparse_identity(6));
  CHECK(max_abs_difference(first, first_explicit) < 1e-15);

  // Operators on different sites commute.
  const DenseMatrix f = dense(first), e = dense(embedded);
  CHECK(max_abs(f * e - e * f) < 1e-15);

  CHECK_THROWS_AS(embed_site_operator(one.sy, 0, dims), ModelError);
  CHECK_THROWS_AS(embed_site_operator(half.sx, 7, dims), ModelError);
}

TEST_CASE("two-electron singlet projector in the bare pair space") {
  const std::vector<Index> dims = {2, 2};
  const DenseMatrix ps = dense(singlet_projector(dims, 0, 1));

  // Basis |uu>, |ud>, |du>, |dd>; P_S = |S><S| with
  // |S> = (|ud> - |du>)/sqrt(2).
  DenseMatrix expected(4, 4);
  expected.setZero();
  expected(1, 1) = 0.5;
  expected(2, 2) = 0.5;
  expected(1, 2) = -0.5;
  expected(2, 1) = -0.5;
  CHECK(max_abs(ps - expected) < 1e-15);
  CHECK(std::abs(ps.trace().real() - 1.0) < 1e-14);
}

TEST_CASE("projector algebra with nuclear factors attached") {
  const std::vector<Index> dims = {2, 2, 3, 2};  // with spin-1 and spin-1/2
  const Index dim = 24;
  const Index z = 6;
  const SparseMatrix ps = singlet_projector(dims, 0, 1);
  const SparseMatrix pt = triplet_projector(dims, 0, 1);
  const DenseMatrix psd = dense(ps), ptd = dense(pt);

  CHECK(std::abs(psd.trace().real() - static_cast<double>(z)) < 1e-12);
  CHECK(std::abs(ptd.trace().real() - 3.0 * static_cast<double>(z)) < 1e-12);
  CHECK(max_abs(psd * psd - psd) < 1e-14);          // idempotent
  CHECK(max_abs(ptd * ptd - ptd) < 1e-14);
  CHECK(max_abs(psd * ptd) < 1e-14);                // orthogonal
  CHECK(max_abs(psd + ptd - DenseMatrix::Identity(dim, dim)) < 1e-15);
  CHECK(max_abs(psd - psd.adjoint().eval()) < 1e-15);

  // Electrons must be spin-1/2 sites.
  CHECK_THROWS_AS(singlet_projector({3, 2}, 0, 1), ModelError);
  CHECK_THROWS_AS(singlet_projector({2, 2}, 0, 0), ModelError);
}

TEST_CASE("field-to-frequency conversion constants") {
  // mu_B/hbar in rad us^-1 mT^-1, per unit g-factor (2022 CODATA).
  CHECK(std::abs(constants::gyromagnetic_per_g - 87.94100059190184) /
            87.94100059190184 <
        1e-12);
  // Larmor frequency of a free-radical electron (g = 2.00232).
  const double w1 = constants::default_g_factor *
                    constants::gyromagnetic_per_g * 1.0;
  CHECK(std::abs(w1 - 176.0860243051769) / 176.0860243051769 < 1e-12);
  const double w005 = constants::default_g_factor *
                      constants::gyromagnetic_per_g * 0.05;
  CHECK(std::abs(w005 - 8.804301215258844) / 8.804301215258844 < 1e-12);
}

TEST_CASE("max_abs_difference sees dropped and differing entries") {
  std::vector<Triplet> a_entries{{0, 0, Complex(1.0, 0.0)},
                                 {1, 2, Complex(0.0, 3.0)}};
  std::vector<Triplet> b_entries{{0, 0, Complex(1.0, 0.0)}};
  const SparseMatrix a = from_coordinates(3, 3, a_entries);
  const SparseMatrix b = from_coordinates(3, 3, b_entries);
  CHECK(max_abs_difference(a, b) == 3.0);
  CHECK(max_abs_difference(a, a) == 0.0);
}

}  // TEST_SUITE
