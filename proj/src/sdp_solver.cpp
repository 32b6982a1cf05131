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

#include "momentray/sdp_solver.hpp"

#include "momentray/dense_linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace momentray {

std::string_view to_string(SdpStatus status) {
  switch (status) {
  case SdpStatus::Optimal:
    return "optimal";
  case SdpStatus::InfeasibleOrFailed:
    return "infeasible-or-failed";
  case SdpStatus::MaxIters:
    return "max-iters";
  }
  return "unknown";
}

namespace {

Matrix sym(const Matrix &A) { return 0.5 * (A + A.transpose()); }

double inner(const Matrix &A, const Matrix &B) { return A.cwiseProduct(B).sum(); }

// Largest alpha keeping diag(lambda) + alpha * D positive semidefinite
// (infinity when D is itself PSD).
double max_step(const Vector &lambda, const Matrix &D) {
  const Vector inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  const Matrix K = inv_sqrt.asDiagonal() * D * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(K), Eigen::EigenvaluesOnly);
  const double lowest = es.eigenvalues()[0];
  if (!std::isfinite(lowest))
    return 0.0;
  if (lowest >= 0.0)
    return std::numeric_limits<double>::infinity();
  return -1.0 / lowest;
}

// Nesterov-Todd scaling: R with R^{-1} X R^{-T} = R^T S R = diag(lambda).
struct NtScaling {
  Matrix R;
  Matrix Rinv;
  Matrix W; // R R^T, satisfies W S W = X
  Vector lambda;
};

std::optional<NtScaling> nt_scaling(const Matrix &X, const Matrix &S) {
  Eigen::LLT<Matrix> cx(X), cs(S);
  if (cx.info() != Eigen::Success || cs.info() != Eigen::Success)
    return std::nullopt;
  const Matrix Lx = cx.matrixL();
  const Matrix Ls = cs.matrixL();
  Eigen::JacobiSVD<Matrix> svd(Ls.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sigma = svd.singularValues();
  if (!(sigma.minCoeff() > 0.0) || !sigma.allFinite())
    return std::nullopt;

  NtScaling nt;
  nt.lambda = sigma;
  const Vector s_inv_half = sigma.cwiseSqrt().cwiseInverse();
  nt.R = Lx * svd.matrixV() * s_inv_half.asDiagonal();
  // R^{-1} = Sigma^{1/2} V^T Lx^{-1} = Sigma^{-1/2} U^T Ls^T.
  nt.Rinv = s_inv_half.asDiagonal() * svd.matrixU().transpose() * Ls.transpose();
  nt.W = sym(nt.R * nt.R.transpose());
  return nt;
}

struct Direction {
  Matrix dX;
  Vector dy;
  Matrix dS;
  Matrix dX_scaled;
  Matrix dS_scaled;
};

// Schur complement M_ij = <R^T A_i R, R^T A_j R> = F^T F with
// F = [svec(R^T A_i R)]. The Cholesky factor of M is taken from a QR of F,
// which keeps the conditioning of F rather than squaring it.
struct SchurFactor {
  std::vector<Matrix> scaled; // R^T A_i R
  Matrix upper;               // R_F with M = R_F^T R_F

  Vector solve(const Vector &rhs) const {
    const auto tri = upper.triangularView<Eigen::Upper>();
    Vector w = tri.transpose().solve(rhs);
    return tri.solve(w);
  }
};

class Ipm {
public:
  Ipm(const Matrix &C, std::vector<Matrix> A, Vector b)
      : C_(C), A_(std::move(A)), b_(std::move(b)), r_(C.rows()) {}

  SolverReport run(const SdpSettings &settings);

private:
  Vector apply(const Matrix &X) const {
    Vector out(static_cast<Eigen::Index>(A_.size()));
    for (std::size_t i = 0; i < A_.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = inner(A_[i], X);
    return out;
  }
  Matrix adjoint(const Vector &y) const {
    Matrix out = Matrix::Zero(r_, r_);
    for (std::size_t i = 0; i < A_.size(); ++i)
      out += y[static_cast<Eigen::Index>(i)] * A_[i];
    return out;
  }

  std::optional<SchurFactor> factor(const NtScaling &nt) const {
    const auto k = static_cast<Eigen::Index>(A_.size());
    SchurFactor f;
    f.scaled.reserve(A_.size());
    Matrix F(r_ * (r_ + 1) / 2, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      f.scaled.push_back(sym(nt.R.transpose() * A_[static_cast<std::size_t>(i)] * nt.R));
      F.col(i) = svec(f.scaled.back());
    }
    if (k == 0) {
      f.upper = Matrix(0, 0);
      return f;
    }
    if (F.rows() < k)
      return std::nullopt;
    Eigen::HouseholderQR<Matrix> qr(F);
    f.upper = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Vector diag = f.upper.diagonal().cwiseAbs();
    if (!diag.allFinite() || !(diag.minCoeff() > 1e-14 * diag.maxCoeff()))
      return std::nullopt;
    return f;
  }

  // Newton step for the scaled complementarity target diag(lambda) o U = T.
  Direction direction(const NtScaling &nt, const SchurFactor &schur, const Vector &rp, const Matrix &Rd,
                      const Matrix &T) const {
    const auto k = static_cast<Eigen::Index>(A_.size());
    Matrix U(r_, r_);
    for (Eigen::Index j = 0; j < r_; ++j) {
      for (Eigen::Index i = 0; i < r_; ++i)
        U(i, j) = 2.0 * T(i, j) / (nt.lambda[i] + nt.lambda[j]);
    }
    const Matrix Rd_scaled = sym(nt.R.transpose() * Rd * nt.R);
    Vector rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto &Ai = schur.scaled[static_cast<std::size_t>(i)];
      rhs[i] = rp[i] - inner(Ai, U) + inner(Ai, Rd_scaled);
    }

    Direction dir;
    dir.dy = k > 0 ? schur.solve(rhs) : Vector(0);
    dir.dS_scaled = Rd_scaled;
    for (Eigen::Index i = 0; i < k; ++i)
      dir.dS_scaled -= dir.dy[i] * schur.scaled[static_cast<std::size_t>(i)];
    dir.dX_scaled = sym(U - dir.dS_scaled);
    dir.dS = sym(Rd - adjoint(dir.dy));
    dir.dX = sym(nt.R * dir.dX_scaled * nt.R.transpose());
    return dir;
  }

  const Matrix &C_;
  std::vector<Matrix> A_;
  Vector b_;
  Eigen::Index r_;
};

SolverReport Ipm::run(const SdpSettings &settings) {
  const auto k = static_cast<Eigen::Index>(A_.size());
  Matrix X = Matrix::Identity(r_, r_) / static_cast<double>(r_);
  Matrix S = Matrix::Identity(r_, r_);
  Vector y = Vector::Zero(k);

  SolverReport report;
  report.status = SdpStatus::MaxIters;
  report.message = "iteration limit reached";

  // Best iterate that met the acceptance tolerances (refinement only).
  bool have_accepted = false;
  SolverReport accepted;

  auto finish = [&](int iters) {
    const Vector rp = b_ - apply(X);
    const Matrix Rd = C_ - S - adjoint(y);
    report.Y = X;
    report.S = S;
    report.y = y;
    report.objective = inner(C_, X);
    report.dual_objective = b_.dot(y);
    report.primal_res = rp.norm();
    report.dual_res = Rd.norm();
    report.gap = std::max(std::abs(report.objective - report.dual_objective), inner(X, S));
    report.iters = iters;
  };

  for (int iter = 0; iter <= settings.max_iters; ++iter) {
    const Vector rp = b_ - apply(X);
    const Matrix Rd = sym(C_ - S - adjoint(y));
    const double pobj = inner(C_, X);
    const double dobj = b_.dot(y);
    const double comp = inner(X, S);
    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(comp)) {
      report.status = SdpStatus::InfeasibleOrFailed;
      report.message = "non-finite iterate";
      finish(iter);
      return have_accepted ? accepted : report;
    }
    const auto meets = [&](double feas, double gap) {
      return rp.norm() <= feas && Rd.norm() <= feas && std::abs(pobj - dobj) <= gap &&
             comp <= gap;
    };
    if (meets(settings.tol_feas, settings.tol_gap)) {
      report.status = SdpStatus::Optimal;
      report.message = "converged";
      finish(iter);
      const bool refining = settings.refine_gap > 0.0 || settings.refine_feas > 0.0;
      const double feas = settings.refine_feas > 0.0 ? settings.refine_feas : settings.tol_feas;
      const double gap = settings.refine_gap > 0.0 ? settings.refine_gap : settings.tol_gap;
      if (!refining || meets(feas, gap))
        return report;
      if (!have_accepted || report.gap <= accepted.gap) {
        accepted = report;
        have_accepted = true;
      }
    }
    if (iter == settings.max_iters)
      break;
    if (X.norm() > 1e12 || S.norm() > 1e12 || y.norm() > 1e12) {
      report.status = SdpStatus::InfeasibleOrFailed;
      report.message = "iterates diverged";
      finish(iter);
      return have_accepted ? accepted : report;
    }

    const auto nt = nt_scaling(X, S);
    if (!nt) {
      report.status = SdpStatus::InfeasibleOrFailed;
      report.message = "lost positive definiteness";
      finish(iter);
      return have_accepted ? accepted : report;
    }

    const auto schur = factor(*nt);
    if (!schur) {
      report.status = SdpStatus::InfeasibleOrFailed;
      report.message = "Schur complement is numerically singular";
      finish(iter);
      return have_accepted ? accepted : report;
    }

    const Vector &lam = nt->lambda;
    const double mu = comp / static_cast<double>(r_);

    // Predictor (affine scaling): target diag(lambda) o U = -diag(lambda)^2.
    Matrix T = Matrix::Zero(r_, r_);
    T.diagonal() = -lam.cwiseAbs2();
    const Direction aff = direction(*nt, *schur, rp, Rd, T);
    const double ap_aff = std::min(1.0, max_step(lam, aff.dX_scaled));
    const double ad_aff = std::min(1.0, max_step(lam, aff.dS_scaled));
    const double mu_aff = inner(X + ap_aff * aff.dX, S + ad_aff * aff.dS) / static_cast<double>(r_);
    double sigma = mu > 0.0 ? std::pow(std::max(mu_aff, 0.0) / mu, 3) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector with the second-order Mehrotra term.
    T.diagonal().array() += sigma * mu;
    T -= sym(aff.dX_scaled * aff.dS_scaled);
    const Direction dir = direction(*nt, *schur, rp, Rd, T);
    const double ap = std::min(1.0, settings.step_factor * max_step(lam, dir.dX_scaled));
    const double ad = std::min(1.0, settings.step_factor * max_step(lam, dir.dS_scaled));
    if (!dir.dy.allFinite() || !dir.dX.allFinite()) {
      report.status = SdpStatus::InfeasibleOrFailed;
      report.message = "non-finite search direction";
      finish(iter);
      return have_accepted ? accepted : report;
    }
    if (ap < settings.min_step && ad < settings.min_step) {
      report.status = SdpStatus::InfeasibleOrFailed;
      report.message = "step length stalled";
      finish(iter);
      return have_accepted ? accepted : report;
    }

    X = sym(X + ap * dir.dX);
    y += ad * dir.dy;
    S = sym(S + ad * dir.dS);
  }

  finish(settings.max_iters);
  return have_accepted ? accepted : report;
}

} // namespace

SolverReport solve_sdp(const SdpProblem &problem, const SdpSettings &settings) {
  const Eigen::Index r = problem.dimension();
  if (r < 1 || problem.objective.cols() != r)
    throw std::invalid_argument("SDP objective must be a nonempty square matrix");
  if (problem.constraints.size() != problem.rhs.size())
    throw std::invalid_argument("SDP constraint and right-hand-side counts differ");
  for (const auto &A : problem.constraints) {
    if (A.rows() != r || A.cols() != r)
      throw std::invalid_argument("SDP constraint matrix has the wrong size");
  }

  const Matrix C = sym(problem.objective);
  SolverReport report;
  if (!C.allFinite()) {
    report.message = "non-finite objective";
    return report;
  }

  // Presolve: keep a numerically independent subset of rows and check that
  // the dropped ones are consistent with it.
  const auto rows = static_cast<Eigen::Index>(problem.constraints.size());
  const Eigen::Index tri = r * (r + 1) / 2;
  Matrix G(tri, rows);
  for (Eigen::Index i = 0; i < rows; ++i)
    G.col(i) = svec(sym(problem.constraints[static_cast<std::size_t>(i)]));
  std::vector<std::size_t> kept;
  if (rows > 0)
    kept = select_independent_columns(G, settings.presolve_tol).indices;
  std::sort(kept.begin(), kept.end());

  Vector b_full = Eigen::Map<const Vector>(problem.rhs.data(), rows);
  Matrix G_kept(tri, static_cast<Eigen::Index>(kept.size()));
  Vector b_kept(static_cast<Eigen::Index>(kept.size()));
  std::vector<Matrix> A_kept;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    G_kept.col(static_cast<Eigen::Index>(j)) = G.col(static_cast<Eigen::Index>(kept[j]));
    b_kept[static_cast<Eigen::Index>(j)] = b_full[static_cast<Eigen::Index>(kept[j])];
    A_kept.push_back(sym(problem.constraints[kept[j]]));
  }
  if (rows > 0 && static_cast<std::size_t>(rows) != kept.size()) {
    const auto qr = G_kept.colPivHouseholderQr();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (std::binary_search(kept.begin(), kept.end(), static_cast<std::size_t>(i)))
        continue;
      double implied = 0.0;
      if (!kept.empty()) {
        const Vector coeff = qr.solve(G.col(i));
        implied = coeff.dot(b_kept);
      }
      if (std::abs(implied - b_full[i]) >
          settings.consistency_tol * std::max(1.0, std::abs(b_full[i]))) {
        report.status = SdpStatus::InfeasibleOrFailed;
        report.message = "inconsistent dependent constraints";
        report.Y = Matrix::Zero(r, r);
        report.S = Matrix::Zero(r, r);
        report.y = Vector::Zero(rows);
        return report;
      }
    }
  }

  Ipm ipm(C, std::move(A_kept), b_kept);
  SolverReport inner_report = ipm.run(settings);

  // Scatter the multipliers back to the caller's row numbering.
  Vector y_full = Vector::Zero(rows);
  for (std::size_t j = 0; j < kept.size(); ++j)
    y_full[static_cast<Eigen::Index>(kept[j])] = inner_report.y[static_cast<Eigen::Index>(j)];
  inner_report.y = y_full;
  inner_report.active_rows = kept.size();
  // Residuals of the dropped rows at the returned solution.
  double dropped = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (std::binary_search(kept.begin(), kept.end(), static_cast<std::size_t>(i)))
      continue;
    const auto &A = problem.constraints[static_cast<std::size_t>(i)];
    const double res = b_full[i] - inner(sym(A), inner_report.Y);
    dropped += res * res;
  }
  inner_report.dropped_res = std::sqrt(dropped);
  if (inner_report.status == SdpStatus::Optimal &&
      inner_report.dropped_res > settings.consistency_tol * std::max(1.0, b_full.lpNorm<Eigen::Infinity>())) {
    inner_report.status = SdpStatus::InfeasibleOrFailed;
    inner_report.message = "dropped rows violated at the solution";
  }

  if (inner_report.Y.allFinite())
    inner_report.rounded_rank = numerical_rank(sym_eig(inner_report.Y).values, settings.round_tol);
  return inner_report;
}

} // namespace momentray
