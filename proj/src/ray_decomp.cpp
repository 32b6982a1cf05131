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

#include "momentray/ray_decomp.hpp"

#include "momentray/dense_linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace momentray {

void ToleranceConfig::validate() const {
  if (!(eps_rank > 0.0) || !(eps_break > 0.0) || !(eps_col > 0.0) || !(eps_alt > 0.0) || t_alt < 1)
    throw std::invalid_argument("all decomposition tolerances must be positive");
}

Matrix RayDecomposition::reconstruction() const {
  const Eigen::Index N = residual.rows();
  Matrix sum = Matrix::Zero(N, N);
  for (const auto &s : steps)
    sum += s.t * s.M;
  return sum;
}

double step_length_diagonal(const Vector &eigenvalues, const Matrix &Mt) {
  if (Mt.rows() != eigenvalues.size() || Mt.cols() != eigenvalues.size())
    throw std::invalid_argument("step_length: size mismatch");
  if (!(eigenvalues.size() > 0) || !(eigenvalues.minCoeff() > 0.0))
    throw std::domain_error("step_length: reduced iterate is not positive definite");
  if (!(Mt.cwiseAbs().maxCoeff() > 1e-14))
    throw std::domain_error("step_length: direction is numerically zero");
  const Vector inv_sqrt = eigenvalues.cwiseSqrt().cwiseInverse();
  const Matrix K = inv_sqrt.asDiagonal() * (0.5 * (Mt + Mt.transpose())) * inv_sqrt.asDiagonal();
  const double top = sym_eig(K).values[0];
  if (!(top > 0.0))
    throw std::domain_error("step_length: direction has no positive curvature");
  return 1.0 / top;
}

double step_length(const Matrix &Xt, const Matrix &Mt) {
  if (Xt.rows() != Xt.cols())
    throw std::invalid_argument("step_length: iterate must be square");
  if (Mt.rows() != Xt.rows() || Mt.cols() != Xt.cols())
    throw std::invalid_argument("step_length: size mismatch");
  const auto eig = sym_eig(Xt);
  // Rotate Mt into the eigenbasis of Xt; the spectrum of the scaled matrix
  // is basis-independent.
  const Matrix rotated = eig.vectors.transpose() * Mt * eig.vectors;
  return step_length_diagonal(eig.values, rotated);
}

Matrix reduced_constraint(const ConstraintSystem &system, std::size_t i, const Matrix &Q) {
  const auto &row = system.rows().at(i);
  Matrix out = Matrix::Zero(Q.cols(), Q.cols());
  auto put = [&](const EntryPos &p, double coeff) {
    const auto qa = Q.row(static_cast<Eigen::Index>(p.row)).transpose();
    if (p.row == p.col) {
      out.noalias() += coeff * qa * qa.transpose();
    } else {
      const auto qb = Q.row(static_cast<Eigen::Index>(p.col)).transpose();
      const Matrix cross = qa * qb.transpose();
      out += 0.5 * coeff * (cross + cross.transpose());
    }
  };
  put(row.plus, 1.0);
  put(row.minus, -1.0);
  return out;
}

namespace {

Matrix random_symmetric(Eigen::Index r, Rng &rng) {
  Matrix B(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i)
      B(i, j) = B(j, i) = rng.normal();
  }
  return B;
}

} // namespace

InnerDecomposition ray_decomp_fr(const SubspaceProjector &projector, const Matrix &X,
                                 const ToleranceConfig &cfg, Rng &rng, int outer_index) {
  cfg.validate();
  const ConstraintSystem &system = projector.system();
  const auto N = static_cast<Eigen::Index>(system.dimension());
  if (X.rows() != N || X.cols() != N)
    throw std::invalid_argument("matrix size does not match the constraint system");

  InnerDecomposition out;
  std::vector<std::size_t> active(system.size());
  for (std::size_t i = 0; i < active.size(); ++i)
    active[i] = i;

  // Each productive iteration lowers the rank; the cap only guards against
  // numerical stagnation.
  const int max_inner = 2 * static_cast<int>(N) + 2;

  Matrix Xk = X;
  int k = 1;
  while (Xk.norm() >= cfg.eps_break) {
    if (k > max_inner) {
      out.sdp_failed = true;
      break;
    }
    const auto eig = sym_eig(Xk);
    const int r = numerical_rank(eig.values, cfg.eps_rank);
    if (r == 0) {
      out.sdp_failed = true;
      break;
    }
    out.iterate_ranks.push_back(r);
    const Matrix Q = eig.vectors.leftCols(r);
    const Vector lam = eig.values.head(r);

    // Facial reduction: restrict constraints to the face Q S_+ Q^T and drop
    // the numerically redundant ones among the survivors of the last pass.
    std::vector<Matrix> reduced;
    reduced.reserve(active.size());
    Matrix G(r * (r + 1) / 2, static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) {
      reduced.push_back(reduced_constraint(system, active[j], Q));
      G.col(static_cast<Eigen::Index>(j)) = svec(reduced.back());
    }
    std::vector<std::size_t> keep;
    if (!active.empty()) {
      const auto sel = select_independent_columns(G, cfg.eps_col);
      if (!sel.monotone)
        ++out.nonmonotone_pivots;
      keep = sel.indices;
      std::sort(keep.begin(), keep.end());
    }

    SdpProblem problem;
    problem.objective = random_symmetric(r, rng);
    std::vector<std::size_t> next_active;
    next_active.reserve(keep.size());
    for (std::size_t j : keep) {
      next_active.push_back(active[j]);
      problem.constraints.push_back(std::move(reduced[j]));
      problem.rhs.push_back(0.0);
    }
    problem.constraints.push_back(Matrix::Identity(r, r));
    problem.rhs.push_back(1.0);
    active = std::move(next_active);

    SolverReport report = solve_sdp(problem, cfg.sdp);
    if (!report.optimal()) {
      out.sdp_failed = true;
      break;
    }

    const Matrix Mt = 0.5 * (report.Y + report.Y.transpose());
    double t = 0.0;
    try {
      t = step_length_diagonal(lam, Mt);
    } catch (const std::domain_error &) {
      t = 0.0;
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
      out.sdp_failed = true;
      break;
    }

    RayStep step;
    step.t = t;
    step.M = Q * Mt * Q.transpose();
    step.M = 0.5 * (step.M + step.M.transpose());
    step.rank = numerical_rank(sym_eig(Mt).values, cfg.eps_rank);
    step.iterate_rank = r;
    step.outer_index = outer_index;
    step.inner_index = k;
    step.active_constraints = active.size();
    step.sdp = std::move(report);

    auto projected = alternating_projection(Xk - t * step.M, projector, cfg.t_alt, cfg.eps_alt);
    step.altproj_iters = projected.iterations;
    out.steps.push_back(std::move(step));
    Xk = std::move(projected.X);
    ++k;
  }
  out.residual = std::move(Xk);
  return out;
}

RayDecomposition ray_decomp_restart(const SubspaceProjector &projector, const Matrix &X,
                                    const ToleranceConfig &cfg, Rng &rng) {
  cfg.validate();
  RayDecomposition out;
  out.config = cfg;

  const double eps_rank_base = cfg.eps_rank;
  out.rank_bound = numerical_rank(sym_eig(X).values, eps_rank_base);

  ToleranceConfig current = cfg;
  Matrix residual = X;
  out.success = residual.norm() < cfg.eps_break;
  for (int round = 1; round <= out.rank_bound && !out.success; ++round) {
    auto inner = ray_decomp_fr(projector, residual, current, rng, round);
    out.rounds = round;
    const bool productive = !inner.steps.empty();
    for (auto &s : inner.steps)
      out.steps.push_back(std::move(s));
    out.iterate_ranks.push_back(std::move(inner.iterate_ranks));
    out.nonmonotone_pivots += inner.nonmonotone_pivots;
    residual = std::move(inner.residual);

    if (residual.norm() < cfg.eps_break) {
      out.success = true;
      break;
    }
    current.eps_rank = productive ? eps_rank_base : current.eps_rank / 10.0;
    residual = alternating_projection(residual, projector, cfg.t_alt, cfg.eps_alt).X;
  }
  out.restarts = std::max(0, out.rounds - 1);
  out.residual = std::move(residual);
  out.residual_norm = out.residual.norm();
  return out;
}

RayDecomposition ray_decomp_restart(const ConstraintSystem &system, const Matrix &X,
                                    const ToleranceConfig &cfg, Rng &rng) {
  const SubspaceProjector projector(system);
  return ray_decomp_restart(projector, X, cfg, rng);
}

ExtremalityResult verify_extremality(const Matrix &M, const ConstraintSystem &system, double eps,
                                     double eps_col) {
  const auto N = static_cast<Eigen::Index>(system.dimension());
  if (M.rows() != N || M.cols() != N)
    throw std::invalid_argument("matrix size does not match the constraint system");
  const auto eig = sym_eig(M);
  const int r = numerical_rank(eig.values, eps);
  if (r == 0)
    throw std::domain_error("verify_extremality: matrix is numerically zero");

  const Matrix Q = eig.vectors.leftCols(r);
  const Eigen::Index tri = r * (r + 1) / 2;
  ExtremalityResult res;
  res.rank = r;
  if (system.size() == 0) {
    res.nullspace_dim = static_cast<int>(tri);
  } else {
    Matrix stacked(static_cast<Eigen::Index>(system.size()), tri);
    for (std::size_t i = 0; i < system.size(); ++i)
      stacked.row(static_cast<Eigen::Index>(i)) = svec(reduced_constraint(system, i, Q)).transpose();
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const Vector sv = svd.singularValues();
    const double cut = eps_col * std::max(sv.size() > 0 ? sv[0] : 0.0, 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > cut)
        ++rank;
    }
    res.nullspace_dim = static_cast<int>(tri) - rank;
  }
  res.extreme = res.nullspace_dim == 1;
  return res;
}

} // namespace momentray
