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

#include "momentray/moment_cone.hpp"
#include "momentray/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace momentray {

/// Cholesky factor of the tridiagonal block T_q = tridiag(-1, 2, -1).
/// L is lower bidiagonal: diag[0..q), sub[0..q-1) below the diagonal.
struct BidiagonalFactor {
  std::vector<double> diag;
  std::vector<double> sub;

  std::size_t size() const { return diag.size(); }
  /// Solves L L^T x = rhs in place.
  void solve_in_place(std::span<double> rhs) const;
};

BidiagonalFactor factor_chain_block(std::size_t q);

/// Per-call work counters used to check the O(m) cost of a projection.
struct ProjectionStats {
  std::size_t row_visits = 0;
};

/// Projection onto ker(A) of a chain-basis Hankel system, with A A^T
/// factored blockwise once.
///
/// The projection is orthogonal in the upper-triangle coordinates that A
/// acts on: X - A^T (A A^T)^{-1} A(X).
class SubspaceProjector {
public:
  explicit SubspaceProjector(const ConstraintSystem &system);

  const ConstraintSystem &system() const { return *system_; }
  const std::vector<BidiagonalFactor> &factors() const { return factors_; }

  /// Throws std::invalid_argument on a size mismatch.
  Matrix project(const Matrix &X, ProjectionStats *stats = nullptr) const;

  /// Solves (A A^T) z = rhs with the blockwise factors.
  Vector solve_gram(const Vector &rhs) const;

private:
  const ConstraintSystem *system_;
  std::vector<BidiagonalFactor> factors_; // one per constraint group
};

struct AltProjResult {
  Matrix X;
  int iterations = 0;
  double residual = 0.0; // ||A(X)|| of the returned (PSD) matrix
  bool converged = false;
};

/// Alternating projection: subspace, then PSD cone, then the residual test,
/// for at most t_alt rounds. The returned matrix is exactly PSD and satisfies
/// the subspace only up to the final residual.
AltProjResult alternating_projection(const Matrix &X, const SubspaceProjector &projector, int t_alt,
                                     double eps_alt);

} // namespace momentray
