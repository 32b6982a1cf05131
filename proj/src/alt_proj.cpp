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

#include "momentray/alt_proj.hpp"

#include "momentray/dense_linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace momentray {

BidiagonalFactor factor_chain_block(std::size_t q) {
  BidiagonalFactor f;
  f.diag.resize(q);
  f.sub.resize(q > 0 ? q - 1 : 0);
  double prev = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    const double below = j > 0 ? -1.0 / prev : 0.0;
    if (j > 0)
      f.sub[j - 1] = below;
    prev = std::sqrt(2.0 - below * below);
    f.diag[j] = prev;
  }
  return f;
}

void BidiagonalFactor::solve_in_place(std::span<double> rhs) const {
  const std::size_t q = diag.size();
  // L w = rhs
  for (std::size_t j = 0; j < q; ++j) {
    if (j > 0)
      rhs[j] -= sub[j - 1] * rhs[j - 1];
    rhs[j] /= diag[j];
  }
  // L^T x = w
  for (std::size_t j = q; j-- > 0;) {
    if (j + 1 < q)
      rhs[j] -= sub[j] * rhs[j + 1];
    rhs[j] /= diag[j];
  }
}

SubspaceProjector::SubspaceProjector(const ConstraintSystem &system) : system_(&system) {
  factors_.reserve(system.groups().size());
  for (const auto &g : system.groups())
    factors_.push_back(factor_chain_block(g.count));
}

Vector SubspaceProjector::solve_gram(const Vector &rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != system_->size())
    throw std::invalid_argument("right-hand side does not match the constraint count");
  Vector z = rhs;
  const auto &groups = system_->groups();
  for (std::size_t g = 0; g < groups.size(); ++g)
    factors_[g].solve_in_place(std::span<double>(z.data() + groups[g].first_row, groups[g].count));
  return z;
}

Matrix SubspaceProjector::project(const Matrix &X, ProjectionStats *stats) const {
  const auto N = static_cast<Eigen::Index>(system_->dimension());
  if (X.rows() != N || X.cols() != N)
    throw std::invalid_argument("matrix size does not match the constraint system");

  const auto &rows = system_->rows();
  Matrix out = 0.5 * (X + X.transpose());
  if (rows.empty())
    return out;

  const Vector z = solve_gram(system_->apply(X));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = z[static_cast<Eigen::Index>(i)];
    out(rows[i].plus.row, rows[i].plus.col) -= v;
    out(rows[i].minus.row, rows[i].minus.col) += v;
  }
  out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
  if (stats)
    stats->row_visits += 3 * rows.size(); // apply, solve, scatter
  return out;
}

AltProjResult alternating_projection(const Matrix &X, const SubspaceProjector &projector, int t_alt,
                                     double eps_alt) {
  if (t_alt < 1)
    throw std::invalid_argument("alternating projection needs at least one iteration");
  AltProjResult result;
  result.X = X;
  for (int k = 1; k <= t_alt; ++k) {
    result.X = psd_projection(projector.project(result.X));
    result.iterations = k;
    result.residual = projector.system().apply(result.X).norm();
    if (result.residual < eps_alt) {
      result.converged = true;
      break;
    }
  }
  return result;
}

} // namespace momentray
