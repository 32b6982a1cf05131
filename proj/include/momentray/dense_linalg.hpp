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

#include "momentray/types.hpp"

#include <cstddef>
#include <vector>

namespace momentray {

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
struct EigenDecomposition {
  Vector values;
  Matrix vectors; // column k pairs with values[k]
};

/// Decomposes (X + X^T)/2. Throws std::invalid_argument on non-square input
/// and std::domain_error on non-finite entries.
EigenDecomposition sym_eig(const Matrix &X);

/// Number of entries strictly greater than eps_rank (absolute threshold).
int numerical_rank(const Vector &values_desc, double eps_rank);

/// Frobenius projection onto the PSD cone (negative eigenvalues clipped).
Matrix psd_projection(const Matrix &X);

/// Result of the pivoted-QR column selection.
struct ColumnSelection {
  std::vector<std::size_t> indices; // pivot prefix, in pivot order
  Vector pivot_magnitudes;          // |diag(R)| in pivot order
  bool monotone = true;             // whether |diag(R)| was non-increasing
};

/// Householder QR with column pivoting (largest remaining column norm, ties
/// to the lowest index). Returns p(1:r) with r the largest i such that
/// |R_ii| > eps_col * |R_11|; empty when A is zero.
ColumnSelection select_independent_columns(const Matrix &A, double eps_col);

inline std::vector<std::size_t> independent_columns(const Matrix &A, double eps_col) {
  return select_independent_columns(A, eps_col).indices;
}

/// Symmetric vectorization: diagonal entries as-is, each off-diagonal pair
/// once scaled by sqrt(2), so <svec(A), svec(B)> = <A, B>_F.
Vector svec(const Matrix &S);
Matrix smat(const Vector &v, Eigen::Index dim);

} // namespace momentray
