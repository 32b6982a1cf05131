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

#include "momentray/dense_linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace momentray {

EigenDecomposition sym_eig(const Matrix &X) {
  if (X.rows() != X.cols())
    throw std::invalid_argument("sym_eig needs a square matrix");
  if (!X.allFinite())
    throw std::domain_error("sym_eig: matrix has non-finite entries");

  const Matrix sym = 0.5 * (X + X.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::domain_error("sym_eig: eigensolver did not converge");

  // Eigen returns ascending order.
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

int numerical_rank(const Vector &values_desc, double eps_rank) {
  int r = 0;
  for (Eigen::Index i = 0; i < values_desc.size(); ++i) {
    if (values_desc[i] > eps_rank)
      ++r;
  }
  return r;
}

Matrix psd_projection(const Matrix &X) {
  const auto eig = sym_eig(X);
  const Eigen::Index n = eig.values.size();
  Eigen::Index keep = 0;
  while (keep < n && eig.values[keep] > 0.0)
    ++keep;
  const auto V = eig.vectors.leftCols(keep);
  Matrix out = V * eig.values.head(keep).asDiagonal() * V.transpose();
  return 0.5 * (out + out.transpose());
}

ColumnSelection select_independent_columns(const Matrix &A, double eps_col) {
  if (!(eps_col > 0.0))
    throw std::invalid_argument("eps_col must be positive");

  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  const Eigen::Index steps = std::min(m, n);

  Matrix R = A;
  std::vector<std::size_t> perm(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    perm[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j);

  Vector norms(n), reference(n);
  for (Eigen::Index j = 0; j < n; ++j)
    norms[j] = reference[j] = R.col(j).norm();

  Vector diag = Vector::Zero(steps);
  for (Eigen::Index k = 0; k < steps; ++k) {
    Eigen::Index pivot = k;
    for (Eigen::Index j = k + 1; j < n; ++j) {
      if (norms[j] > norms[pivot])
        pivot = j;
    }
    if (pivot != k) {
      R.col(k).swap(R.col(pivot));
      std::swap(norms[k], norms[pivot]);
      std::swap(reference[k], reference[pivot]);
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(pivot)]);
    }

    // Householder reflector zeroing R(k+1:m, k).
    auto x = R.col(k).tail(m - k);
    const double alpha = x.norm();
    if (alpha == 0.0) {
      diag[k] = 0.0;
      continue;
    }
    const double beta = x[0] > 0.0 ? -alpha : alpha;
    Vector v = x;
    v[0] -= beta;
    const double vnorm2 = v.squaredNorm();
    if (vnorm2 > 0.0) {
      auto block = R.block(k, k, m - k, n - k);
      const Eigen::RowVectorXd w = (v.transpose() * block) * (2.0 / vnorm2);
      block.noalias() -= v * w;
    }
    R(k, k) = beta;
    R.col(k).tail(m - k - 1).setZero();
    diag[k] = std::abs(beta);

    // Downdate trailing column norms; recompute when cancellation sets in.
    for (Eigen::Index j = k + 1; j < n; ++j) {
      if (norms[j] == 0.0)
        continue;
      const double ratio = std::abs(R(k, j)) / norms[j];
      double factor = std::max(0.0, (1.0 - ratio) * (1.0 + ratio));
      const double check = factor * (norms[j] / reference[j]) * (norms[j] / reference[j]);
      if (check <= std::sqrt(std::numeric_limits<double>::epsilon())) {
        norms[j] = R.col(j).tail(m - k - 1).norm();
        reference[j] = norms[j];
      } else {
        norms[j] *= std::sqrt(factor);
      }
    }
  }

  ColumnSelection out;
  out.pivot_magnitudes = diag;
  for (Eigen::Index k = 1; k < steps; ++k) {
    if (diag[k] > diag[k - 1])
      out.monotone = false;
  }
  if (steps == 0 || diag[0] == 0.0)
    return out;

  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    if (diag[k] > eps_col * diag[0])
      r = k + 1;
  }
  out.indices.assign(perm.begin(), perm.begin() + r);
  return out;
}

Vector svec(const Matrix &S) {
  const Eigen::Index n = S.rows();
  Vector v(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i)
      v[k++] = i == j ? S(i, j) : std::numbers::sqrt2 * 0.5 * (S(i, j) + S(j, i));
  }
  return v;
}

Matrix smat(const Vector &v, Eigen::Index dim) {
  if (v.size() != dim * (dim + 1) / 2)
    throw std::invalid_argument("smat: vector length does not match dimension");
  Matrix S(dim, dim);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double value = i == j ? v[k] : v[k] / std::numbers::sqrt2;
      S(i, j) = S(j, i) = value;
      ++k;
    }
  }
  return S;
}

} // namespace momentray
