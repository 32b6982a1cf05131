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
#include "momentray/ray_decomp.hpp"
#include "momentray/recovery.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace momentray {

/// One trial of the recovery sweep.
struct SweepRecord {
  int d = 0;
  int n = 0;
  int s = 0;
  std::uint64_t seed = 0;
  int r = 0; // number of returned steps
  double e_w = 1.0;
  double e_z = 1.0;
  int max_rank = 0;
  std::vector<int> ranks;
  bool success = false; // decomposition converged and every atom was recovered
  int restarts = 0;
  double wall_time_s = 0.0; // decomposition only
};

/// Mean statistics over the trials of one atom count.
struct SweepSummary {
  int d = 0;
  int n = 0;
  int s = 0;
  int trials = 0;
  double success_rate = 0.0;
  double mean_e_w = 0.0;
  double mean_e_z = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records; // sorted by (s, seed)
  std::vector<SweepSummary> summaries;
};

/// Everything produced by one seeded trial.
struct TrialResult {
  Instance instance;
  RayDecomposition decomposition;
  RecoveredAtoms recovery;
  RecoveryErrors errors;
  SweepRecord record;
};

/// Seed of the random objectives used when decomposing the trial with
/// the given instance seed.
std::uint64_t decomposition_seed(std::uint64_t seed);

/// Generates the instance for `seed`, decomposes it and recovers the atoms.
TrialResult run_trial(const SubspaceProjector &projector, int s, std::uint64_t seed,
                      const ToleranceConfig &cfg);

struct SweepOptions {
  int d = 2;
  int n = 3;
  int s_min = 2;
  int s_max = 2;
  int trials = 20;
  std::uint64_t base_seed = 0;
  int workers = 1; // 0 picks the hardware concurrency
};

/// Trial i of every s uses seed base_seed + i. Throws std::invalid_argument
/// unless 2 <= s_min <= s_max <= C(n+d, d) and trials >= 1.
SweepResult sweep(const SweepOptions &options, const ToleranceConfig &cfg);

/// CSV text of a sweep: one row per record, then a "# summary" block.
std::string sweep_csv(const SweepResult &result);

/// One returned step of a rank-histogram trial.
struct RankRecord {
  int d = 0;
  int n = 0;
  int s = 0;
  std::uint64_t seed = 0;
  int step = 0; // 1-based
  int rank = 0;
  bool extreme = false;
  int null_dim = 0;
  double t = 0.0;
};

/// Numerical rank cut used for the extremality verdicts.
inline constexpr double kExtremalityEps = 1e-6;

/// Decomposes `trials` instances with s atoms and records every step's
/// rank and extremality verdict. Same seeding and preconditions as sweep
/// with s_min = s_max = s.
std::vector<RankRecord> rank_histogram(const SweepOptions &options, const ToleranceConfig &cfg);

std::string rank_csv(const std::vector<RankRecord> &records);

/// Writes `text` to `path` through a temporary file and a rename.
/// Throws std::runtime_error when the path is not writable.
void write_file_atomic(const std::string &path, const std::string &text);

struct Table1Row {
  int d = 0;
  int n = 0;
  int expected = 0;
  int computed = 0;
  bool match = false;
};

/// theoretical_atom_bound against the published theoretical row for
/// d = 2, n = 3..10 and d = 3, n = 2..5.
std::vector<Table1Row> table1_check();

} // namespace momentray
