// Copyright 2026 The momentray Authors
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

#pragma once

#include "momentray/multiindex.hpp"
#include "momentray/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace momentray {

/// Upper-triangle matrix position (row <= col).
struct EntryPos {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const EntryPos &) const = default;
};

/// One Hankel equality X[plus] - X[minus] = 0.
struct ConstraintRow {
  EntryPos plus;
  EntryPos minus;
};

/// Rows [first_row, first_row + count) share the exponent sum gamma and form
/// a chain: row j links pair j+1 to pair j of the group.
struct ConstraintGroup {
  MultiIndex gamma;
  std::size_t first_row = 0;
  std::size_t count = 0;
};

/// Hankel equality operator of the pseudo-moment cone in the chain basis.
///
/// The operator acts on the upper-triangle coordinates of a symmetric N x N
/// matrix. Each row has one +1 and one -1, so A A^T is block diagonal with
/// tridiagonal (2, -1) blocks, one per exponent sum with at least two pairs.
class ConstraintSystem {
public:
  /// Throws std::invalid_argument for n < 1 or d < 1.
  static ConstraintSystem hankel(int n, int d);

  int variables() const { return n_; }
  int degree() const { return d_; }
  std::size_t dimension() const { return N_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<ConstraintRow> &rows() const { return rows_; }
  const std::vector<ConstraintGroup> &groups() const { return groups_; }
  const MultiIndexTable &table() const { return table_; }

  /// A(X). Only the upper triangle of X is read.
  Vector apply(const Matrix &X) const;
  /// A^T y in upper-triangle coordinates, mirrored into a symmetric matrix.
  Matrix adjoint(const Vector &y) const;
  /// Symmetric A_i with <A_i, X>_F = X[plus] - X[minus] for symmetric X.
  Matrix functional_matrix(std::size_t i) const;
  /// Dense m x m Gram matrix A A^T (for oracles and diagnostics).
  Matrix dense_gram() const;

private:
  int n_ = 0;
  int d_ = 0;
  std::size_t N_ = 0;
  MultiIndexTable table_;
  std::vector<ConstraintRow> rows_;
  std::vector<ConstraintGroup> groups_;
};

/// ||A(X)||_2. Throws std::invalid_argument on a size mismatch.
double hankel_residual(const Matrix &X, const ConstraintSystem &system);

/// Monomials of degree <= table.degree() evaluated at z, in table order.
Vector monomial_vector(std::span<const double> z, const MultiIndexTable &table);
Vector monomial_vector(std::span<const double> z, int d);
inline Vector monomial_vector(const Vector &z, const MultiIndexTable &table) {
  return monomial_vector(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), table);
}
inline Vector monomial_vector(const Vector &z, int d) {
  return monomial_vector(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), d);
}

/// sum_i weights[i] * m_d(z_i) m_d(z_i)^T.
///
/// Atoms are accumulated in a canonical order (sorted by the bytes of
/// (z_i, weight_i)), so any joint permutation of the inputs yields a
/// bit-identical result. Throws std::invalid_argument on empty or
/// inconsistent input.
Matrix moment_matrix(std::span<const double> weights, const std::vector<Vector> &atoms, int d);

/// Largest s with s <= (C(n+d,d) + 1)/2 - C(n+2d,2d)/C(n+d,d), clamped at 0.
/// Evaluated in exact integer arithmetic.
int theoretical_atom_bound(int n, int d);

/// Planted measure together with its moment matrix.
struct Instance {
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<double> weights; // coefficients c_i (the w_i^2)
  std::vector<Vector> atoms;
  Matrix X;

  std::size_t atom_count() const { return atoms.size(); }
  /// Smallest coefficient below 1e-6 (recorded, never resampled).
  bool has_tiny_weight() const;
};

/// Coefficients i.i.d. U[0,1], atom coordinates i.i.d. U[-1,1].
/// Throws std::invalid_argument for s < 1, n < 1 or d < 1.
Instance random_instance(int n, int d, int s, std::uint64_t seed);

} // namespace momentray
