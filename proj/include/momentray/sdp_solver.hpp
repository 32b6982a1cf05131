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
#include <string_view>
#include <vector>

namespace momentray {

/// min <objective, Y>  s.t.  <constraints[i], Y> = rhs[i],  Y PSD.
///
/// The trace normalization is an ordinary row (identity matrix, rhs 1).
struct SdpProblem {
  Matrix objective;
  std::vector<Matrix> constraints;
  std::vector<double> rhs;

  Eigen::Index dimension() const { return objective.rows(); }
};

enum class SdpStatus { Optimal, InfeasibleOrFailed, MaxIters };

std::string_view to_string(SdpStatus status);

struct SdpSettings {
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  int max_iters = 100;
  double step_factor = 0.98;     // fraction to the boundary
  double min_step = 1e-10;       // both step lengths below this is a stall
  double presolve_tol = 1e-10;   // relative pivot threshold for dependent rows
  double round_tol = 1e-8;       // eigenvalue cut for the reported rounded rank
  // A row dropped in presolve may disagree with the rows it depends on by at
  // most this much (absolute, scaled by max(1, |rhs|)).
  double consistency_tol = 1e-7;
  // Optional refinement: once tol_gap/tol_feas hold, keep iterating toward
  // these tighter targets. The best accepted iterate is returned if the
  // refinement stalls. Zero disables refinement.
  double refine_gap = 0.0;
  double refine_feas = 0.0;
};

struct SolverReport {
  SdpStatus status = SdpStatus::InfeasibleOrFailed;
  Matrix Y;      // primal solution (untruncated)
  Vector y;      // dual multipliers, one per input row (0 for rows dropped in presolve)
  Matrix S;      // dual slack
  double objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0; // max(|primal - dual objective|, <Y, S>)
  double primal_res = 0.0;  // residual of the rows kept by presolve
  double dropped_res = 0.0; // residual of the rows dropped by presolve
  double dual_res = 0.0;
  int iters = 0;
  int rounded_rank = 0;
  std::size_t active_rows = 0; // rows kept by presolve
  std::string_view message;

  bool optimal() const { return status == SdpStatus::Optimal; }
};

/// Dense primal-dual interior-point method: Nesterov-Todd scaling,
/// Mehrotra predictor-corrector, Cholesky on the Schur complement.
///
/// Never throws on numerical trouble; a singular Newton system, a stalled
/// step or an unreachable tolerance come back as a non-optimal status.
/// Throws std::invalid_argument only for malformed problems.
SolverReport solve_sdp(const SdpProblem &problem, const SdpSettings &settings = {});

} // namespace momentray
