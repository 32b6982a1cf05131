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

// Reference solver for small SDPs of the form
//   min <B, Y>  s.t.  tr(Y) = 1,  <A_i, Y> = b_i,  Y PSD,
// independent of the interior-point code. Under strict feasibility the
// optimum equals the maximum of the concave dual function
//   g(y) = lambda_min(B - sum_i y_i A_i) + sum_i y_i b_i,
// which is maximized by brute force: an exhaustive grid over a box locates
// the optimum coarsely, then the ellipsoid method driven by supergradients
// s_i = b_i - v^T A_i v (v a unit eigenvector for lambda_min) refines it
// with a certified optimality gap. Pure grid zooming is not used for the
// refinement because on a nonsmooth concave function in several variables
// the best grid point can sit far from the maximizer along a ridge.

#include "momentray/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace momentray::testing {

inline double dual_value(const Matrix &B, const std::vector<Matrix> &A, const std::vector<double> &b,
                         const Vector &y) {
  Matrix S = B;
  double lin = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    S -= y[static_cast<Eigen::Index>(i)] * A[i];
    lin += y[static_cast<Eigen::Index>(i)] * b[i];
  }
  return Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues()(0) + lin;
}

struct DualOracleResult {
  double value = -std::numeric_limits<double>::infinity();
  Vector y;
  double gap_bound = std::numeric_limits<double>::infinity(); // certified max g - value
  bool interior = true; // maximizer found strictly inside the search box
};

namespace detail {

inline double dual_value_and_supergradient(const Matrix &B, const std::vector<Matrix> &A,
                                           const std::vector<double> &b, const Vector &y, Vector &sup) {
  Matrix S = B;
  double lin = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    S -= y[static_cast<Eigen::Index>(i)] * A[i];
    lin += y[static_cast<Eigen::Index>(i)] * b[i];
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  const Vector v = es.eigenvectors().col(0);
  sup.resize(static_cast<Eigen::Index>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    sup[static_cast<Eigen::Index>(i)] = b[i] - v.dot(A[i] * v);
  return es.eigenvalues()(0) + lin;
}

} // namespace detail

/// Maximizes the dual function over the box [-radius, radius]^k, sampling
/// `points` values per axis first. Stops once the certified optimality gap
/// drops below `gap_tol`.
inline DualOracleResult dual_oracle(const Matrix &B, const std::vector<Matrix> &A, const std::vector<double> &b,
                                    double radius = 50.0, int points = 17, double gap_tol = 1e-11,
                                    int max_iters = 20000) {
  const auto k = static_cast<Eigen::Index>(A.size());
  DualOracleResult best;
  best.y = Vector::Zero(k);
  Vector sup;
  if (k == 0) {
    best.value = detail::dual_value_and_supergradient(B, A, b, best.y, sup);
    best.gap_bound = 0.0;
    return best;
  }
  auto consider = [&](const Vector &y, double v) {
    if (v > best.value) {
      best.value = v;
      best.y = y;
    }
  };
  {
    const double h = 2.0 * radius / (points - 1);
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    for (;;) {
      Vector y(k);
      for (Eigen::Index i = 0; i < k; ++i)
        y[i] = -radius + h * idx[static_cast<std::size_t>(i)];
      consider(y, detail::dual_value_and_supergradient(B, A, b, y, sup));
      Eigen::Index pos = 0;
      while (pos < k && ++idx[static_cast<std::size_t>(pos)] == points)
        idx[static_cast<std::size_t>(pos++)] = 0;
      if (pos == k)
        break;
    }
  }
  if (k == 1) {
    double lo = -radius, hi = radius;
    for (int it = 0; it < max_iters && hi - lo > 1e-14 * radius; ++it) {
      Vector y(1);
      y[0] = 0.5 * (lo + hi);
      const double v = detail::dual_value_and_supergradient(B, A, b, y, sup);
      consider(y, v);
      best.gap_bound = std::min(best.gap_bound, best.value - v + std::abs(sup[0]) * (hi - lo));
      if (sup[0] > 0.0)
        lo = y[0];
      else if (sup[0] < 0.0)
        hi = y[0];
      else {
        best.gap_bound = 0.0;
        break;
      }
      if (best.gap_bound < gap_tol)
        break;
    }
  } else {
    // A ball of radius 2 sqrt(k) radius around any box point contains the box.
    const double n = static_cast<double>(k);
    Vector c = best.y;
    Matrix P = (4.0 * n * radius * radius) * Matrix::Identity(k, k);
    for (int it = 0; it < max_iters; ++it) {
      const double v = detail::dual_value_and_supergradient(B, A, b, c, sup);
      consider(c, v);
      const double width = std::sqrt(std::max(0.0, sup.dot(P * sup)));
      // Every maximizer inside the ellipsoid satisfies g <= v + width.
      best.gap_bound = std::min(best.gap_bound, v + width - best.value);
      if (width == 0.0 || best.gap_bound < gap_tol)
        break;
      // Keep the half-ellipsoid {y : sup . (y - c) >= 0}.
      const Vector Pg = P * sup / width;
      c += Pg / (n + 1.0);
      P = (n * n / (n * n - 1.0)) * (P - (2.0 / (n + 1.0)) * Pg * Pg.transpose());
      P = 0.5 * (P + P.transpose());
    }
  }
  best.interior = best.y.cwiseAbs().maxCoeff() < 0.99 * radius;
  return best;
}

} // namespace momentray::testing
