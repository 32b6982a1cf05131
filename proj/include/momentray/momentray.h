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


/* C interface to momentray: moment-cone extreme-ray decomposition, atom
 * recovery, the facial SDP solver and the experiment drivers.
 *
 * Conventions:
 *  - Every fallible function returns mr_status; MR_OK is zero. On failure
 *    mr_last_error() describes the problem (thread-local, valid until the
 *    next call on the same thread).
 *  - Matrices are dense, row-major, double precision.
 *  - Objects are opaque handles released with the matching *_free function;
 *    passing NULL to a *_free function is a no-op.
 *  - No C++ exception crosses this boundary. */

#ifndef MOMENTRAY_H
#define MOMENTRAY_H

#include <stddef.h>
#include <stdint.h>

#if defined(MOMENTRAY_BUILDING_LIBRARY)
#define MR_API __attribute__((visibility("default")))
#else
#define MR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mr_status {
  MR_OK = 0,
  MR_ERR_INVALID_ARGUMENT = 1, /* bad sizes, ranges or NULL pointers */
  MR_ERR_NUMERICAL = 2,        /* non-finite data or a numerical breakdown */
  MR_ERR_IO = 3,               /* a file could not be written */
  MR_ERR_INTERNAL = 4          /* unexpected failure */
} mr_status;

MR_API const char *mr_last_error(void);
MR_API const char *mr_version(void);

/* ---- Tolerances ------------------------------------------------------- */

typedef struct mr_config {
  double eps_rank;  /* eigenvalue cut for numerical rank */
  double eps_break; /* stop once the remainder's Frobenius norm is below this */
  double eps_col;   /* relative pivot cut for redundant constraints */
  double eps_alt;   /* alternating-projection residual target */
  int t_alt;        /* alternating-projection iteration cap */
  double sdp_tol_gap;
  double sdp_tol_feas;
  int sdp_max_iters;
} mr_config;

/* Fills the defaults used for all reported experiments. */
MR_API void mr_config_default(mr_config *cfg);

/* ---- Combinatorics ---------------------------------------------------- */

MR_API mr_status mr_binomial(uint64_t a, uint64_t b, uint64_t *out);
/* Number of monomials of degree <= d in n variables, C(n+d, d). */
MR_API mr_status mr_moment_dimension(int n, int d, size_t *out);
/* Generic upper bound on the number of uniquely recoverable atoms. */
MR_API mr_status mr_theoretical_atom_bound(int n, int d, int *out);

/* ---- Constraint system ------------------------------------------------ */

typedef struct mr_constraints mr_constraints;

MR_API mr_status mr_constraints_create(int n, int d, mr_constraints **out);
MR_API void mr_constraints_free(mr_constraints *system);
MR_API size_t mr_constraints_dimension(const mr_constraints *system); /* N */
MR_API size_t mr_constraints_count(const mr_constraints *system);     /* rows */
/* Euclidean norm of the constraint residual of an N x N matrix. */
MR_API mr_status mr_constraints_residual(const mr_constraints *system, const double *X, double *out);

/* ---- Instances -------------------------------------------------------- */

typedef struct mr_instance mr_instance;

/* s random atoms and weights in dimension n, moment matrix of degree d. */
MR_API mr_status mr_instance_random(int n, int d, int s, uint64_t seed, mr_instance **out);
/* weights: s values; atoms: s x n row-major. */
MR_API mr_status mr_instance_from_atoms(int n, int d, size_t s, const double *weights,
                                        const double *atoms, mr_instance **out);
MR_API void mr_instance_free(mr_instance *inst);
MR_API int mr_instance_n(const mr_instance *inst);
MR_API int mr_instance_d(const mr_instance *inst);
MR_API size_t mr_instance_atom_count(const mr_instance *inst);
MR_API size_t mr_instance_dimension(const mr_instance *inst);
MR_API uint64_t mr_instance_seed(const mr_instance *inst);
MR_API void mr_instance_weights(const mr_instance *inst, double *out); /* s */
MR_API void mr_instance_atoms(const mr_instance *inst, double *out);   /* s x n */
MR_API void mr_instance_matrix(const mr_instance *inst, double *out);  /* N x N */

/* ---- Decomposition ---------------------------------------------------- */

typedef struct mr_decomposition mr_decomposition;

typedef struct mr_decomposition_info {
  size_t steps;
  size_t dimension; /* N */
  double residual_norm;
  int success;
  int restarts;
  int rounds;
  int rank_bound;
  double wall_time_s;
} mr_decomposition_info;

typedef struct mr_step_info {
  double t;
  int rank;
  int iterate_rank;
  int outer_index;
  int inner_index;
  double sdp_gap;
  int sdp_iters;
} mr_step_info;

/* Decomposes the N x N matrix X. The random objectives are drawn from seed.
 * cfg may be NULL for the defaults. */
MR_API mr_status mr_decompose(const mr_constraints *system, const double *X, const mr_config *cfg,
                              uint64_t seed, mr_decomposition **out);
MR_API void mr_decomposition_free(mr_decomposition *dec);
MR_API void mr_decomposition_get_info(const mr_decomposition *dec, mr_decomposition_info *info);
MR_API mr_status mr_decomposition_step(const mr_decomposition *dec, size_t k, mr_step_info *info);
/* Trace-one N x N matrix of step k. */
MR_API mr_status mr_decomposition_step_matrix(const mr_decomposition *dec, size_t k, double *out);
MR_API void mr_decomposition_residual(const mr_decomposition *dec, double *out);

/* ---- Recovery --------------------------------------------------------- */

typedef struct mr_recovery mr_recovery;

/* Reads one atom off every rank-one step; never fails on a failed recovery,
 * which is reported by mr_recovery_success instead. */
MR_API mr_status mr_recover(const mr_decomposition *dec, size_t expected_atoms, mr_recovery **out);
MR_API void mr_recovery_free(mr_recovery *rec);
MR_API int mr_recovery_success(const mr_recovery *rec);
MR_API const char *mr_recovery_failure(const mr_recovery *rec);
MR_API size_t mr_recovery_count(const mr_recovery *rec);
MR_API int mr_recovery_n(const mr_recovery *rec);
MR_API void mr_recovery_weights(const mr_recovery *rec, double *out);
MR_API void mr_recovery_atoms(const mr_recovery *rec, double *out); /* count x n */
/* Relative errors against known weights (s) and atoms (s x n). */
MR_API mr_status mr_recovery_errors(const mr_recovery *rec, size_t s, const double *weights,
                                    const double *atoms, double *e_w, double *e_z);

/* ---- Extremality ------------------------------------------------------ */

MR_API mr_status mr_verify_extremality(const mr_constraints *system, const double *M, double eps,
                                       int *extreme, int *nullspace_dim, int *rank);

/* ---- SDP solver ------------------------------------------------------- */

typedef enum mr_sdp_status {
  MR_SDP_OPTIMAL = 0,
  MR_SDP_FAILED = 1,
  MR_SDP_MAX_ITERS = 2
} mr_sdp_status;

typedef struct mr_sdp_result {
  mr_sdp_status status;
  double objective;
  double dual_objective;
  double gap;
  double primal_res;
  double dual_res;
  int iters;
  int rounded_rank;
  size_t active_rows;
  char message[64];
} mr_sdp_result;

/* min <B, Y> s.t. <A_i, Y> = b_i, Y PSD. B is r x r; A holds m row-major
 * r x r matrices back to back. Y (r x r) and y (m) may be NULL. Solver
 * trouble is reported in result->status, not as an error. */
MR_API mr_status mr_sdp_solve(size_t r, const double *B, size_t m, const double *A, const double *b,
                              mr_sdp_result *result, double *Y, double *y);

/* ---- Experiments ------------------------------------------------------ */

typedef struct mr_sweep_options {
  int d;
  int n;
  int s_min;
  int s_max;
  int trials;
  uint64_t base_seed;
  int workers; /* 0 = hardware concurrency */
} mr_sweep_options;

typedef struct mr_sweep_summary {
  int s;
  int trials;
  double success_rate;
  double mean_e_w;
  double mean_e_z;
} mr_sweep_summary;

/* Runs the recovery sweep and writes its CSV to out_path (atomically).
 * Up to `capacity` per-s summaries are copied to summaries; *count receives
 * the number available. cfg may be NULL. */
MR_API mr_status mr_sweep(const mr_sweep_options *options, const mr_config *cfg, const char *out_path,
                          mr_sweep_summary *summaries, size_t capacity, size_t *count);

typedef struct mr_rank_summary {
  int trials;
  size_t steps;
  int max_rank;
  int seeds_with_max_rank; /* seeds containing a step of rank max_rank */
  size_t high_rank_steps;  /* steps of rank > 1 */
  size_t high_rank_extreme;
  size_t extreme_steps;
} mr_rank_summary;

/* Uses options->s_min as the atom count (s_max is ignored). */
MR_API mr_status mr_rank_histogram(const mr_sweep_options *options, const mr_config *cfg,
                                   const char *out_path, mr_rank_summary *summary);

typedef struct mr_table1_row {
  int d;
  int n;
  int expected;
  int computed;
  int match;
} mr_table1_row;

MR_API mr_status mr_table1(mr_table1_row *rows, size_t capacity, size_t *count);

#ifdef __cplusplus
}
#endif

#endif /* MOMENTRAY_H */
