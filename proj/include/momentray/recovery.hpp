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
#include "momentray/multiindex.hpp"
#include "momentray/ray_decomp.hpp"
#include "momentray/types.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace momentray {

enum class RecoveryFailure { None, WrongCount, HighRankStep, DegenerateAtom };

std::string_view to_string(RecoveryFailure reason);

struct RecoveredAtoms {
  std::vector<double> weights; // w^2
  std::vector<Vector> atoms;
  bool success = false;
  RecoveryFailure failure_reason = RecoveryFailure::None;
  double max_consistency = 0.0; // worst ||m_d(z) - h/h_1||_inf over steps
};

struct ExtractedAtom {
  double weight = 0.0; // w^2 = t h_1^2
  Vector z;
  double consistency = 0.0; // ||m_d(z) - h/h_1||_inf
};

/// Rank-one test on a trace-normalized step: lambda_2 / lambda_1 <= tol.
bool is_rank_one(const Matrix &M, double ratio_tol = 1e-6);

/// Reads the weight and atom off a rank-one step. Throws std::domain_error
/// when the step is not rank one or its leading eigenvector has
/// |h_1| < h1_min (an atom at infinity).
ExtractedAtom extract_atom(double t, const Matrix &M, const MultiIndexTable &table,
                           double ratio_tol = 1e-6, double h1_min = 1e-8);

/// Applies extract_atom to every step; fails with WrongCount when the step
/// count differs from expected_count and with HighRankStep when any step is
/// not rank one.
RecoveredAtoms recover_atoms(const RayDecomposition &decomposition, const MultiIndexTable &table,
                             std::size_t expected_count);

struct RecoveryErrors {
  double e_w = 1.0;
  double e_z = 1.0;
  double e_z_best = 1.0; // e_z under the best atom matching (diagnostic)
};

/// Relative errors after sorting both weight lists increasingly;
/// (1, 1) for a failed recovery. Weights tied within 1e-9 are matched to
/// minimize the total atom distance inside the tied block.
RecoveryErrors recovery_errors(const std::vector<double> &true_weights, const std::vector<Vector> &true_atoms,
                               const RecoveredAtoms &recovered);
inline RecoveryErrors recovery_errors(const Instance &truth, const RecoveredAtoms &recovered) {
  return recovery_errors(truth.weights, truth.atoms, recovered);
}

/// Minimum-cost perfect matching on a square cost matrix; returns the column
/// assigned to each row.
std::vector<std::size_t> min_cost_assignment(const Matrix &cost);

} // namespace momentray
