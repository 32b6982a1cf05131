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


#include "momentray/momentray.h"

#include "momentray/experiments.hpp"
#include "momentray/moment_cone.hpp"
#include "momentray/multiindex.hpp"
#include "momentray/ray_decomp.hpp"
#include "momentray/recovery.hpp"
#include "momentray/sdp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

using namespace momentray;

struct mr_constraints {
  ConstraintSystem system;
  SubspaceProjector projector;

  explicit mr_constraints(ConstraintSystem s) : system(std::move(s)), projector(system) {}
  mr_constraints(const mr_constraints &) = delete;
  mr_constraints &operator=(const mr_constraints &) = delete;
};

struct mr_instance {
  Instance inst;
};

struct mr_decomposition {
  RayDecomposition dec;
  MultiIndexTable table;
  double wall_time_s = 0.0;
};

struct mr_recovery {
  RecoveredAtoms rec;
  int n = 0;
  std::string failure;
};

namespace {

thread_local std::string g_last_error;

mr_status fail(mr_status status, const std::string &message) {
  g_last_error = message;
  return status;
}

/// Runs body and converts any exception into a status code.
template <class Body> mr_status guarded(Body &&body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const std::invalid_argument &e) {
    return fail(MR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range &e) {
    return fail(MR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error &e) {
    return fail(MR_ERR_NUMERICAL, e.what());
  } catch (const std::overflow_error &e) {
    return fail(MR_ERR_NUMERICAL, e.what());
  } catch (const std::runtime_error &e) {
    return fail(MR_ERR_IO, e.what());
  } catch (const std::bad_alloc &) {
    return fail(MR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(MR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MR_ERR_INTERNAL, "unknown error");
  }
}

Matrix read_matrix(const double *data, std::size_t rows, std::size_t cols) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void write_matrix(const Matrix &M, double *out) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(out, M.rows(), M.cols()) = M;
}

ToleranceConfig to_config(const mr_config *cfg) {
  ToleranceConfig out;
  if (cfg) {
    out.eps_rank = cfg->eps_rank;
    out.eps_break = cfg->eps_break;
    out.eps_col = cfg->eps_col;
    out.eps_alt = cfg->eps_alt;
    out.t_alt = cfg->t_alt;
    out.sdp.tol_gap = cfg->sdp_tol_gap;
    out.sdp.tol_feas = cfg->sdp_tol_feas;
    out.sdp.max_iters = cfg->sdp_max_iters;
  }
  out.validate();
  if (out.sdp.tol_gap <= 0.0 || out.sdp.tol_feas <= 0.0 || out.sdp.max_iters < 1)
    throw std::invalid_argument("SDP tolerances and iteration cap must be positive");
  return out;
}

SweepOptions to_options(const mr_sweep_options *o) {
  SweepOptions out;
  out.d = o->d;
  out.n = o->n;
  out.s_min = o->s_min;
  out.s_max = o->s_max;
  out.trials = o->trials;
  out.base_seed = o->base_seed;
  out.workers = o->workers;
  return out;
}

#define MR_REQUIRE(cond, what)                                                                     \
  do {                                                                                             \
    if (!(cond))                                                                                   \
      return fail(MR_ERR_INVALID_ARGUMENT, what);                                                  \
  } while (0)

} // namespace

extern "C" {

const char *mr_last_error(void) { return g_last_error.c_str(); }

const char *mr_version(void) { return "0.1.0"; }

void mr_config_default(mr_config *cfg) {
  if (!cfg)
    return;
  const ToleranceConfig def;
  cfg->eps_rank = def.eps_rank;
  cfg->eps_break = def.eps_break;
  cfg->eps_col = def.eps_col;
  cfg->eps_alt = def.eps_alt;
  cfg->t_alt = def.t_alt;
  cfg->sdp_tol_gap = def.sdp.tol_gap;
  cfg->sdp_tol_feas = def.sdp.tol_feas;
  cfg->sdp_max_iters = def.sdp.max_iters;
}

mr_status mr_binomial(uint64_t a, uint64_t b, uint64_t *out) {
  MR_REQUIRE(out, "output pointer is NULL");
  return guarded([&] {
    *out = binomial(a, b);
    return MR_OK;
  });
}

mr_status mr_moment_dimension(int n, int d, size_t *out) {
  MR_REQUIRE(out, "output pointer is NULL");
  MR_REQUIRE(n >= 1 && d >= 0, "need n >= 1 and d >= 0");
  return guarded([&] {
    *out = static_cast<size_t>(binomial(static_cast<uint64_t>(n + d), static_cast<uint64_t>(d)));
    return MR_OK;
  });
}

mr_status mr_theoretical_atom_bound(int n, int d, int *out) {
  MR_REQUIRE(out, "output pointer is NULL");
  return guarded([&] {
    *out = theoretical_atom_bound(n, d);
    return MR_OK;
  });
}

mr_status mr_constraints_create(int n, int d, mr_constraints **out) {
  MR_REQUIRE(out, "output pointer is NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new mr_constraints(ConstraintSystem::hankel(n, d));
    return MR_OK;
  });
}

void mr_constraints_free(mr_constraints *system) { delete system; }

size_t mr_constraints_dimension(const mr_constraints *system) {
  return system ? system->system.dimension() : 0;
}

size_t mr_constraints_count(const mr_constraints *system) { return system ? system->system.size() : 0; }

mr_status mr_constraints_residual(const mr_constraints *system, const double *X, double *out) {
  MR_REQUIRE(system && X && out, "NULL argument");
  return guarded([&] {
    const std::size_t N = system->system.dimension();
    *out = hankel_residual(read_matrix(X, N, N), system->system);
    return MR_OK;
  });
}

mr_status mr_instance_random(int n, int d, int s, uint64_t seed, mr_instance **out) {
  MR_REQUIRE(out, "output pointer is NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new mr_instance{random_instance(n, d, s, seed)};
    return MR_OK;
  });
}

mr_status mr_instance_from_atoms(int n, int d, size_t s, const double *weights, const double *atoms,
                                 mr_instance **out) {
  MR_REQUIRE(out, "output pointer is NULL");
  *out = nullptr;
  MR_REQUIRE(n >= 1 && d >= 1, "need n >= 1 and d >= 1");
  MR_REQUIRE(s == 0 || (weights && atoms), "NULL weights or atoms");
  return guarded([&] {
    auto inst = std::make_unique<mr_instance>();
    inst->inst.n = n;
    inst->inst.d = d;
    inst->inst.weights.assign(weights, weights + s);
    for (std::size_t i = 0; i < s; ++i) {
      inst->inst.atoms.push_back(
          Eigen::Map<const Vector>(atoms + i * static_cast<std::size_t>(n), n));
    }
    inst->inst.X = moment_matrix(inst->inst.weights, inst->inst.atoms, d);
    *out = inst.release();
    return MR_OK;
  });
}

void mr_instance_free(mr_instance *inst) { delete inst; }
int mr_instance_n(const mr_instance *inst) { return inst ? inst->inst.n : 0; }
int mr_instance_d(const mr_instance *inst) { return inst ? inst->inst.d : 0; }
size_t mr_instance_atom_count(const mr_instance *inst) { return inst ? inst->inst.weights.size() : 0; }
size_t mr_instance_dimension(const mr_instance *inst) {
  return inst ? static_cast<size_t>(inst->inst.X.rows()) : 0;
}
uint64_t mr_instance_seed(const mr_instance *inst) { return inst ? inst->inst.seed : 0; }

void mr_instance_weights(const mr_instance *inst, double *out) {
  if (inst && out)
    std::copy(inst->inst.weights.begin(), inst->inst.weights.end(), out);
}

void mr_instance_atoms(const mr_instance *inst, double *out) {
  if (!inst || !out)
    return;
  for (const auto &z : inst->inst.atoms)
    out = std::copy(z.data(), z.data() + z.size(), out);
}

void mr_instance_matrix(const mr_instance *inst, double *out) {
  if (inst && out)
    write_matrix(inst->inst.X, out);
}

mr_status mr_decompose(const mr_constraints *system, const double *X, const mr_config *cfg, uint64_t seed,
                       mr_decomposition **out) {
  MR_REQUIRE(out, "output pointer is NULL");
  *out = nullptr;
  MR_REQUIRE(system && X, "NULL argument");
  return guarded([&] {
    const ToleranceConfig config = to_config(cfg);
    const std::size_t N = system->system.dimension();
    const Matrix input = read_matrix(X, N, N);
    if (!input.allFinite())
      return fail(MR_ERR_NUMERICAL, "input matrix has non-finite entries");
    if ((input - input.transpose()).norm() > 1e-12 * std::max(1.0, input.norm()))
      return fail(MR_ERR_INVALID_ARGUMENT, "input matrix is not symmetric");
    Rng rng(seed);
    auto dec = std::make_unique<mr_decomposition>();
    const auto start = std::chrono::steady_clock::now();
    dec->dec = ray_decomp_restart(system->projector, input, config, rng);
    dec->wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    dec->table = system->system.table();
    *out = dec.release();
    return MR_OK;
  });
}

void mr_decomposition_free(mr_decomposition *dec) { delete dec; }

void mr_decomposition_get_info(const mr_decomposition *dec, mr_decomposition_info *info) {
  if (!dec || !info)
    return;
  info->steps = dec->dec.steps.size();
  info->dimension = static_cast<size_t>(dec->dec.residual.rows());
  info->residual_norm = dec->dec.residual_norm;
  info->success = dec->dec.success ? 1 : 0;
  info->restarts = dec->dec.restarts;
  info->rounds = dec->dec.rounds;
  info->rank_bound = dec->dec.rank_bound;
  info->wall_time_s = dec->wall_time_s;
}

mr_status mr_decomposition_step(const mr_decomposition *dec, size_t k, mr_step_info *info) {
  MR_REQUIRE(dec && info, "NULL argument");
  MR_REQUIRE(k < dec->dec.steps.size(), "step index out of range");
  const auto &step = dec->dec.steps[k];
  info->t = step.t;
  info->rank = step.rank;
  info->iterate_rank = step.iterate_rank;
  info->outer_index = step.outer_index;
  info->inner_index = step.inner_index;
  info->sdp_gap = step.sdp.gap;
  info->sdp_iters = step.sdp.iters;
  return MR_OK;
}

mr_status mr_decomposition_step_matrix(const mr_decomposition *dec, size_t k, double *out) {
  MR_REQUIRE(dec && out, "NULL argument");
  MR_REQUIRE(k < dec->dec.steps.size(), "step index out of range");
  write_matrix(dec->dec.steps[k].M, out);
  return MR_OK;
}

void mr_decomposition_residual(const mr_decomposition *dec, double *out) {
  if (dec && out)
    write_matrix(dec->dec.residual, out);
}

mr_status mr_recover(const mr_decomposition *dec, size_t expected_atoms, mr_recovery **out) {
  MR_REQUIRE(out, "output pointer is NULL");
  *out = nullptr;
  MR_REQUIRE(dec, "NULL decomposition");
  return guarded([&] {
    auto rec = std::make_unique<mr_recovery>();
    rec->rec = recover_atoms(dec->dec, dec->table, expected_atoms);
    rec->n = dec->table.variables();
    rec->failure = std::string(to_string(rec->rec.failure_reason));
    *out = rec.release();
    return MR_OK;
  });
}

void mr_recovery_free(mr_recovery *rec) { delete rec; }
int mr_recovery_success(const mr_recovery *rec) { return rec && rec->rec.success ? 1 : 0; }
const char *mr_recovery_failure(const mr_recovery *rec) { return rec ? rec->failure.c_str() : ""; }
size_t mr_recovery_count(const mr_recovery *rec) { return rec ? rec->rec.weights.size() : 0; }
int mr_recovery_n(const mr_recovery *rec) { return rec ? rec->n : 0; }

void mr_recovery_weights(const mr_recovery *rec, double *out) {
  if (rec && out)
    std::copy(rec->rec.weights.begin(), rec->rec.weights.end(), out);
}

void mr_recovery_atoms(const mr_recovery *rec, double *out) {
  if (!rec || !out)
    return;
  for (const auto &z : rec->rec.atoms)
    out = std::copy(z.data(), z.data() + z.size(), out);
}

mr_status mr_recovery_errors(const mr_recovery *rec, size_t s, const double *weights, const double *atoms,
                             double *e_w, double *e_z) {
  MR_REQUIRE(rec && e_w && e_z, "NULL argument");
  MR_REQUIRE(s == 0 || (weights && atoms), "NULL weights or atoms");
  return guarded([&] {
    std::vector<double> w(weights, weights + s);
    std::vector<Vector> z;
    for (std::size_t i = 0; i < s; ++i)
      z.push_back(Eigen::Map<const Vector>(atoms + i * static_cast<std::size_t>(rec->n), rec->n));
    const auto err = recovery_errors(w, z, rec->rec);
    *e_w = err.e_w;
    *e_z = err.e_z;
    return MR_OK;
  });
}

mr_status mr_verify_extremality(const mr_constraints *system, const double *M, double eps, int *extreme,
                                int *nullspace_dim, int *rank) {
  MR_REQUIRE(system && M && extreme && nullspace_dim && rank, "NULL argument");
  MR_REQUIRE(eps > 0.0, "eps must be positive");
  return guarded([&] {
    const std::size_t N = system->system.dimension();
    const auto res = verify_extremality(read_matrix(M, N, N), system->system, eps);
    *extreme = res.extreme ? 1 : 0;
    *nullspace_dim = res.nullspace_dim;
    *rank = res.rank;
    return MR_OK;
  });
}

mr_status mr_sdp_solve(size_t r, const double *B, size_t m, const double *A, const double *b,
                       mr_sdp_result *result, double *Y, double *y) {
  MR_REQUIRE(B && result, "NULL argument");
  MR_REQUIRE(m == 0 || (A && b), "NULL constraint data");
  MR_REQUIRE(r >= 1, "dimension must be positive");
  return guarded([&] {
    SdpProblem problem;
    problem.objective = read_matrix(B, r, r);
    for (std::size_t i = 0; i < m; ++i) {
      problem.constraints.push_back(read_matrix(A + i * r * r, r, r));
      problem.rhs.push_back(b[i]);
    }
    const auto report = solve_sdp(problem);
    result->status = report.status == SdpStatus::Optimal    ? MR_SDP_OPTIMAL
                     : report.status == SdpStatus::MaxIters ? MR_SDP_MAX_ITERS
                                                            : MR_SDP_FAILED;
    result->objective = report.objective;
    result->dual_objective = report.dual_objective;
    result->gap = report.gap;
    result->primal_res = report.primal_res;
    result->dual_res = report.dual_res;
    result->iters = report.iters;
    result->rounded_rank = report.rounded_rank;
    result->active_rows = report.active_rows;
    const std::size_t len = std::min(report.message.size(), sizeof(result->message) - 1);
    std::memcpy(result->message, report.message.data(), len);
    result->message[len] = '\0';
    if (Y && report.Y.rows() == static_cast<Eigen::Index>(r))
      write_matrix(report.Y, Y);
    if (y && report.y.size() == static_cast<Eigen::Index>(m))
      std::copy(report.y.data(), report.y.data() + m, y);
    return MR_OK;
  });
}

mr_status mr_sweep(const mr_sweep_options *options, const mr_config *cfg, const char *out_path,
                   mr_sweep_summary *summaries, size_t capacity, size_t *count) {
  MR_REQUIRE(options, "NULL options");
  MR_REQUIRE(capacity == 0 || summaries, "NULL summary buffer");
  return guarded([&] {
    const auto result = sweep(to_options(options), to_config(cfg));
    if (out_path)
      write_file_atomic(out_path, sweep_csv(result));
    const std::size_t copied = std::min(capacity, result.summaries.size());
    for (std::size_t i = 0; i < copied; ++i) {
      const auto &src = result.summaries[i];
      summaries[i] = {src.s, src.trials, src.success_rate, src.mean_e_w, src.mean_e_z};
    }
    if (count)
      *count = result.summaries.size();
    return MR_OK;
  });
}

mr_status mr_rank_histogram(const mr_sweep_options *options, const mr_config *cfg, const char *out_path,
                            mr_rank_summary *summary) {
  MR_REQUIRE(options, "NULL options");
  return guarded([&] {
    SweepOptions opts = to_options(options);
    opts.s_max = opts.s_min;
    const auto records = rank_histogram(opts, to_config(cfg));
    if (out_path)
      write_file_atomic(out_path, rank_csv(records));
    if (summary) {
      mr_rank_summary sum{};
      sum.trials = opts.trials;
      sum.steps = records.size();
      for (const auto &rec : records) {
        sum.max_rank = std::max(sum.max_rank, rec.rank);
        sum.extreme_steps += rec.extreme ? 1 : 0;
        if (rec.rank > 1) {
          ++sum.high_rank_steps;
          sum.high_rank_extreme += rec.extreme ? 1 : 0;
        }
      }
      std::uint64_t last_seed = std::numeric_limits<std::uint64_t>::max();
      for (const auto &rec : records) {
        if (rec.rank == sum.max_rank && rec.seed != last_seed) {
          ++sum.seeds_with_max_rank;
          last_seed = rec.seed;
        }
      }
      *summary = sum;
    }
    return MR_OK;
  });
}

mr_status mr_table1(mr_table1_row *rows, size_t capacity, size_t *count) {
  MR_REQUIRE(capacity == 0 || rows, "NULL row buffer");
  return guarded([&] {
    const auto table = table1_check();
    const std::size_t copied = std::min(capacity, table.size());
    for (std::size_t i = 0; i < copied; ++i) {
      const auto &src = table[i];
      rows[i] = {src.d, src.n, src.expected, src.computed, src.match ? 1 : 0};
    }
    if (count)
      *count = table.size();
    return MR_OK;
  });
}

} // extern "C"
