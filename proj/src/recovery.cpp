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

#include "momentray/recovery.hpp"

#include "momentray/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace momentray {

std::string_view to_string(RecoveryFailure reason) {
  switch (reason) {
  case RecoveryFailure::None:
    return "none";
  case RecoveryFailure::WrongCount:
    return "wrong-count";
  case RecoveryFailure::HighRankStep:
    return "high-rank-step";
  case RecoveryFailure::DegenerateAtom:
    return "degenerate-atom";
  }
  return "unknown";
}

bool is_rank_one(const Matrix &M, double ratio_tol) {
  const auto eig = sym_eig(M);
  if (!(eig.values[0] > 0.0))
    return false;
  if (eig.values.size() < 2)
    return true;
  return eig.values[1] / eig.values[0] <= ratio_tol;
}

ExtractedAtom extract_atom(double t, const Matrix &M, const MultiIndexTable &table, double ratio_tol,
                           double h1_min) {
  if (static_cast<std::size_t>(M.rows()) != table.size() || M.rows() != M.cols())
    throw std::invalid_argument("step matrix does not match the monomial table");
  const auto eig = sym_eig(M);
  if (!(eig.values[0] > 0.0) || (eig.values.size() > 1 && eig.values[1] / eig.values[0] > ratio_tol))
    throw std::domain_error("extract_atom: step is not rank one");

  const Vector h = eig.vectors.col(0);
  const double h1 = h[0];
  if (std::abs(h1) < h1_min)
    throw std::domain_error("extract_atom: leading eigenvector has a vanishing constant entry");

  const Vector m = h / h1;
  const int n = table.variables();
  ExtractedAtom out;
  out.z.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(i)] = 1;
    out.z[i] = m[static_cast<Eigen::Index>(table.index_of(MultiIndex(std::move(e))))];
  }
  out.weight = t * h1 * h1;
  const Vector resynth = monomial_vector(std::span<const double>(out.z.data(), static_cast<std::size_t>(n)), table);
  out.consistency = (resynth - m).cwiseAbs().maxCoeff();
  return out;
}

RecoveredAtoms recover_atoms(const RayDecomposition &decomposition, const MultiIndexTable &table,
                             std::size_t expected_count) {
  RecoveredAtoms out;
  if (decomposition.steps.size() != expected_count) {
    out.failure_reason = RecoveryFailure::WrongCount;
    return out;
  }
  for (const auto &step : decomposition.steps) {
    if (!is_rank_one(step.M)) {
      out.failure_reason = RecoveryFailure::HighRankStep;
      out.weights.clear();
      out.atoms.clear();
      return out;
    }
  }
  for (const auto &step : decomposition.steps) {
    try {
      auto atom = extract_atom(step.t, step.M, table);
      out.max_consistency = std::max(out.max_consistency, atom.consistency);
      out.weights.push_back(atom.weight);
      out.atoms.push_back(std::move(atom.z));
    } catch (const std::domain_error &) {
      out.failure_reason = RecoveryFailure::DegenerateAtom;
      out.weights.clear();
      out.atoms.clear();
      return out;
    }
  }
  out.success = true;
  return out;
}

std::vector<std::size_t> min_cost_assignment(const Matrix &cost) {
  // Hungarian method with potentials, 1-based internally.
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows())
    throw std::invalid_argument("assignment needs a square cost matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j])
          continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j)
    assignment[p[j] - 1] = j - 1;
  return assignment;
}

RecoveryErrors recovery_errors(const std::vector<double> &true_weights, const std::vector<Vector> &true_atoms,
                               const RecoveredAtoms &recovered) {
  RecoveryErrors err;
  const std::size_t s = true_weights.size();
  if (!recovered.success || recovered.weights.size() != s || recovered.atoms.size() != s || s == 0)
    return err;

  auto sorted_order = [](const std::vector<double> &w) {
    std::vector<std::size_t> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    return idx;
  };
  const auto ti = sorted_order(true_weights);
  std::vector<std::size_t> ri = sorted_order(recovered.weights);

  auto atom_error = [&](std::size_t t, std::size_t r) {
    return (recovered.atoms[r] - true_atoms[t]).norm() / (1.0 + true_atoms[t].norm());
  };

  // Re-pair inside blocks of (near-)tied true weights.
  for (std::size_t begin = 0; begin < s;) {
    std::size_t end = begin + 1;
    while (end < s && true_weights[ti[end]] - true_weights[ti[end - 1]] <= 1e-9)
      ++end;
    const std::size_t len = end - begin;
    if (len > 1) {
      Matrix cost(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
      for (std::size_t a = 0; a < len; ++a) {
        for (std::size_t b = 0; b < len; ++b)
          cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              (recovered.atoms[ri[begin + b]] - true_atoms[ti[begin + a]]).norm();
      }
      const auto assign = min_cost_assignment(cost);
      std::vector<std::size_t> block(len);
      for (std::size_t a = 0; a < len; ++a)
        block[a] = ri[begin + assign[a]];
      std::copy(block.begin(), block.end(), ri.begin() + static_cast<std::ptrdiff_t>(begin));
    }
    begin = end;
  }

  double ew = 0.0, ez = 0.0;
  for (std::size_t k = 0; k < s; ++k) {
    const double c = true_weights[ti[k]];
    ew += std::abs(recovered.weights[ri[k]] - c) / (1.0 + c);
    ez += atom_error(ti[k], ri[k]);
  }
  err.e_w = ew / static_cast<double>(s);
  err.e_z = ez / static_cast<double>(s);

  Matrix cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b)
      cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = atom_error(a, b);
  }
  const auto best = min_cost_assignment(cost);
  double ez_best = 0.0;
  for (std::size_t a = 0; a < s; ++a)
    ez_best += cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(best[a]));
  err.e_z_best = ez_best / static_cast<double>(s);
  return err;
}

} // namespace momentray
