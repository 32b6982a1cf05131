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

#include "momentray/alt_proj.hpp"
#include "momentray/moment_cone.hpp"
#include "momentray/random.hpp"
#include "momentray/sdp_solver.hpp"
#include "momentray/types.hpp"

#include <cstddef>
#include <vector>

namespace momentray {

/// Tolerances of the robust decomposition. Defaults are the values used for
/// all reported experiments.
struct ToleranceConfig {
  double eps_rank = 1e-7;  // eigenvalue cut for numerical rank (absolute, strict)
  double eps_break = 1e-4; // stop once ||X_k||_F drops below this
  double eps_col = 1e-7;   // relative pivot cut for redundant constraints
  double eps_alt = 1e-14;  // alternating-projection residual target
  int t_alt = 500;         // alternating-projection iteration cap
  // Solver settings for the facial SDPs; accepted solutions are refined
  // toward a tighter gap so near-tied vertices come out cleanly rank one.
  SdpSettings sdp{.refine_gap = 1e-12, .refine_feas = 1e-12};

  /// Throws std::invalid_argument unless every tolerance is positive.
  void validate() const;
};

/// One extracted ray: X is reduced by t * M.
struct RayStep {
  double t = 0.0;
  Matrix M;              // lifted, trace one
  int rank = 0;          // numerical rank of M
  int iterate_rank = 0;  // numerical rank r_k of the iterate it came from
  int outer_index = 0;   // restart round (1-based)
  int inner_index = 0;   // iteration within the round (1-based)
  std::size_t active_constraints = 0;
  int altproj_iters = 0;
  SolverReport sdp;
};

/// Output of one facial-reduction pass.
struct InnerDecomposition {
  std::vector<RayStep> steps;
  Matrix residual;
  std::vector<int> iterate_ranks; // r_k per iteration, in order
  bool sdp_failed = false;
  std::size_t nonmonotone_pivots = 0;
};

struct RayDecomposition {
  std::vector<RayStep> steps;
  Matrix residual;
  double residual_norm = 0.0;
  bool success = false;
  int restarts = 0;      // outer rounds beyond the first
  int rounds = 0;        // outer rounds executed
  int rank_bound = 0;    // r_max, numerical rank of the input
  std::vector<std::vector<int>> iterate_ranks; // one r_k sequence per round
  std::size_t nonmonotone_pivots = 0;
  ToleranceConfig config;

  /// Sum of t_k M_k.
  Matrix reconstruction() const;
};

/// sup { t >= 0 : Xt - t Mt is PSD } = 1 / lambda_max(Xt^{-1/2} Mt Xt^{-1/2}).
/// Throws std::domain_error if Xt is not positive definite or Mt is zero.
double step_length(const Matrix &Xt, const Matrix &Mt);
/// Same, with Xt = diag(eigenvalues).
double step_length_diagonal(const Vector &eigenvalues, const Matrix &Mt);

/// Inner pass: facial reduction, random linear objective, closed-form step,
/// re-projection; returns early on solver failure.
InnerDecomposition ray_decomp_fr(const SubspaceProjector &projector, const Matrix &X,
                                 const ToleranceConfig &cfg, Rng &rng, int outer_index = 1);

/// Full decomposition with restarts and adaptive rank tolerance.
RayDecomposition ray_decomp_restart(const SubspaceProjector &projector, const Matrix &X,
                                    const ToleranceConfig &cfg, Rng &rng);
RayDecomposition ray_decomp_restart(const ConstraintSystem &system, const Matrix &X,
                                    const ToleranceConfig &cfg, Rng &rng);

struct ExtremalityResult {
  bool extreme = false;
  int nullspace_dim = 0;
  int rank = 0;
};

/// Numerical extremality test: with Q spanning range(M) (eigenvalues > eps),
/// M spans an extreme ray iff W -> (<Q^T A_i Q, W>)_i has a one-dimensional
/// kernel on symmetric matrices. Singular values count as zero below
/// eps_col * max(sigma_max, 1). Throws std::domain_error when M is
/// numerically zero.
ExtremalityResult verify_extremality(const Matrix &M, const ConstraintSystem &system, double eps,
                                     double eps_col = 1e-7);

/// Q^T A_i Q for constraint row i (A_i as in ConstraintSystem::functional_matrix).
Matrix reduced_constraint(const ConstraintSystem &system, std::size_t i, const Matrix &Q);

} // namespace momentray
