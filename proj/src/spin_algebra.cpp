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

#include "spinjump/spin_algebra.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "spinjump/errors.hpp"

namespace spinjump {

namespace {

bool is_half_integer_spin(double spin) {
  const double doubled = 2.0 * spin;
  return spin > 0.0 && std::abs(doubled - std::round(doubled)) < 1e-12;
}

}  // namespace

SpinOperators spin_matrices(double spin) {
  if (!is_half_integer_spin(spin)) {
    throw ModelError("spin quantum number must be a positive multiple of 1/2, got " +
                     std::to_string(spin));
  }
  const Index dim = static_cast<Index>(std::lround(2.0 * spin)) + 1;

  SpinOperators ops;
  ops.spin = spin;
  ops.dim = dim;

  // Basis index k corresponds to m = spin - k.  The raising operator
  // connects |m> to |m+1>, i.e. index k to k-1, with matrix element
  // sqrt(s(s+1) - m(m+1)).
  std::vector<Triplet> tp, tm, tz;
  tp.reserve(dim);
  tm.reserve(dim);
  tz.reserve(dim);
  for (Index k = 0; k < dim; ++k) {
    const double m = spin - static_cast<double>(k);
    if (std::abs(m) > 1e-12) tz.emplace_back(k, k, Complex(m, 0.0));
    if (k > 0) {
      const double elem = std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
      tp.emplace_back(k - 1, k, Complex(elem, 0.0));
      tm.emplace_back(k, k - 1, Complex(elem, 0.0));
    }
  }
  ops.sp = from_coordinates(dim, dim, tp);
  ops.sm = from_coordinates(dim, dim, tm);
  ops.sz = from_coordinates(dim, dim, tz);

  // Sx = (S+ + S-)/2, Sy = (S+ - S-)/(2i)
  ops.sx = (ops.sp + ops.sm) * Complex(0.5, 0.0);
  ops.sy = (ops.sp - ops.sm) * Complex(0.0, -0.5);
  ops.sx.makeCompressed();
  ops.sy.makeCompressed();
  return ops;
}

SparseMatrix sparse_identity(Index dim) {
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return id;
}

SparseMatrix kronecker(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix result(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(a.nonZeros()) *
                  static_cast<std::size_t>(b.nonZeros()));
  for (int ja = 0; ja < a.outerSize(); ++ja) {
    for (SparseMatrix::InnerIterator ita(a, ja); ita; ++ita) {
      for (int jb = 0; jb < b.outerSize(); ++jb) {
        for (SparseMatrix::InnerIterator itb(b, jb); itb; ++itb) {
          entries.emplace_back(ita.row() * b.rows() + itb.row(),
                               ita.col() * b.cols() + itb.col(),
                               ita.value() * itb.value());
        }
      }
    }
  }
  result.setFromTriplets(entries.begin(), entries.end());
  return result;
}

SparseMatrix from_coordinates(Index rows, Index cols,
                              const std::vector<Triplet>& entries) {
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "coordinate (%lld, %lld) outside %lld x %lld matrix",
                    static_cast<long long>(t.row()),
                    static_cast<long long>(t.col()),
                    static_cast<long long>(rows), static_cast<long long>(cols));
      throw ModelError(buf);
    }
  }
  SparseMatrix m(rows, cols);
  // setFromTriplets sums duplicate coordinates, which is the contract here.
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

SparseMatrix embed_site_operator(const SparseMatrix& op, std::size_t site,
                                 const std::vector<Index>& dims) {
  if (site >= dims.size()) {
    throw ModelError("site index " + std::to_string(site) +
                     " out of range for " + std::to_string(dims.size()) +
                     " sites");
  }
  if (op.rows() != dims[site] || op.cols() != dims[site]) {
    throw ModelError("operator dimension " + std::to_string(op.rows()) +
                     " does not match site dimension " +
                     std::to_string(dims[site]));
  }
  Index left = 1, right = 1;
  for (std::size_t s = 0; s < dims.size(); ++s) {
    if (dims[s] < 1) throw ModelError("site dimensions must be positive");
    if (s < site) left *= dims[s];
    if (s > site) right *= dims[s];
  }
  // I_left ⊗ op ⊗ I_right, built directly from the block structure rather
  // than by two explicit Kronecker products.
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(op.nonZeros()) *
                  static_cast<std::size_t>(left) *
                  static_cast<std::size_t>(right));
  for (int j = 0; j < op.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(op, j); it; ++it) {
      for (Index l = 0; l < left; ++l) {
        const Index row_base = (l * op.rows() + it.row()) * right;
        const Index col_base = (l * op.cols() + it.col()) * right;
        for (Index r = 0; r < right; ++r) {
          entries.emplace_back(row_base + r, col_base + r, it.value());
        }
      }
    }
  }
  const Index dim = left * op.rows() * right;
  return from_coordinates(dim, dim, entries);
}

SparseMatrix singlet_projector(const std::vector<Index>& dims,
                               std::size_t site_a, std::size_t site_b) {
  if (site_a == site_b) throw ModelError("electron sites must differ");
  if (site_a >= dims.size() || site_b >= dims.size()) {
    throw ModelError("electron site index out of range");
  }
  if (dims[site_a] != 2 || dims[site_b] != 2) {
    throw ModelError("singlet projector requires spin-1/2 sites");
  }
  const SpinOperators half = spin_matrices(0.5);
  Index dim = 1;
  for (Index d : dims) dim *= d;

  SparseMatrix p = sparse_identity(dim) * Complex(0.25, 0.0);
  const SparseMatrix ax[3] = {half.sx, half.sy, half.sz};
  for (const auto& component : ax) {
    const SparseMatrix a = embed_site_operator(component, site_a, dims);
    const SparseMatrix b = embed_site_operator(component, site_b, dims);
    p = p - SparseMatrix(a * b);
  }
  p.makeCompressed();
  p.prune([](Index, Index, const Complex& v) { return std::abs(v) > 1e-15; });
  return p;
}

SparseMatrix triplet_projector(const std::vector<Index>& dims,
                               std::size_t site_a, std::size_t site_b) {
  Index dim = 1;
  for (Index d : dims) dim *= d;
  SparseMatrix p = sparse_identity(dim) - singlet_projector(dims, site_a, site_b);
  p.makeCompressed();
  p.prune([](Index, Index, const Complex& v) { return std::abs(v) > 1e-15; });
  return p;
}

double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix d = a - b;
  double mx = 0.0;
  for (int j = 0; j < d.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(d, j); it; ++it) {
      mx = std::max(mx, std::abs(it.value()));
    }
  }
  return mx;
}

}  // namespace spinjump
