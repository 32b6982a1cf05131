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

#include "momentray/moment_cone.hpp"

#include "momentray/random.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

namespace momentray {

ConstraintSystem ConstraintSystem::hankel(int n, int d) {
  if (n < 1 || d < 1)
    throw std::invalid_argument("Hankel constraints need n >= 1 and d >= 1");

  ConstraintSystem sys;
  sys.n_ = n;
  sys.d_ = d;
  sys.table_ = MultiIndexTable::build(n, d, DegreeMode::UpTo);
  sys.N_ = sys.table_.size();

  // Pairs (alpha, beta) with alpha <= beta are visited with alpha increasing,
  // so each group's pair list comes out sorted by graded lex on alpha.
  std::map<MultiIndex, std::vector<EntryPos>> by_gamma;
  for (std::size_t i = 0; i < sys.N_; ++i) {
    for (std::size_t j = i; j < sys.N_; ++j)
      by_gamma[add(sys.table_[i], sys.table_[j])].push_back({i, j});
  }

  for (auto &[gamma, pairs] : by_gamma) {
    if (pairs.size() < 2)
      continue;
    ConstraintGroup group{gamma, sys.rows_.size(), pairs.size() - 1};
    for (std::size_t k = 1; k < pairs.size(); ++k)
      sys.rows_.push_back({pairs[k], pairs[k - 1]});
    sys.groups_.push_back(std::move(group));
  }
  return sys;
}

Vector ConstraintSystem::apply(const Matrix &X) const {
  Vector out(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto &r = rows_[i];
    out[static_cast<Eigen::Index>(i)] = X(r.plus.row, r.plus.col) - X(r.minus.row, r.minus.col);
  }
  return out;
}

Matrix ConstraintSystem::adjoint(const Vector &y) const {
  Matrix out = Matrix::Zero(N_, N_);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto &r = rows_[i];
    const double v = y[static_cast<Eigen::Index>(i)];
    out(r.plus.row, r.plus.col) += v;
    out(r.minus.row, r.minus.col) -= v;
  }
  out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
  return out;
}

Matrix ConstraintSystem::functional_matrix(std::size_t i) const {
  Matrix A = Matrix::Zero(N_, N_);
  auto put = [&](const EntryPos &p, double coeff) {
    if (p.row == p.col) {
      A(p.row, p.col) += coeff;
    } else {
      A(p.row, p.col) += 0.5 * coeff;
      A(p.col, p.row) += 0.5 * coeff;
    }
  };
  put(rows_.at(i).plus, 1.0);
  put(rows_[i].minus, -1.0);
  return A;
}

Matrix ConstraintSystem::dense_gram() const {
  const std::size_t tri = N_ * (N_ + 1) / 2;
  auto coord = [&](const EntryPos &p) { return p.row * N_ - p.row * (p.row + 1) / 2 + p.col; };
  Matrix A = Matrix::Zero(rows_.size(), tri);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    A(i, coord(rows_[i].plus)) += 1.0;
    A(i, coord(rows_[i].minus)) -= 1.0;
  }
  return A * A.transpose();
}

double hankel_residual(const Matrix &X, const ConstraintSystem &system) {
  if (X.rows() != X.cols() || static_cast<std::size_t>(X.rows()) != system.dimension())
    throw std::invalid_argument("matrix size does not match the constraint system");
  return system.apply(X).norm();
}

Vector monomial_vector(std::span<const double> z, const MultiIndexTable &table) {
  if (z.size() != static_cast<std::size_t>(table.variables()))
    throw std::invalid_argument("point dimension does not match the monomial table");
  Vector v(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    double value = 1.0;
    const auto &alpha = table[k];
    for (std::size_t i = 0; i < z.size(); ++i) {
      for (int e = 0; e < alpha[i]; ++e)
        value *= z[i];
    }
    v[static_cast<Eigen::Index>(k)] = value;
  }
  return v;
}

Vector monomial_vector(std::span<const double> z, int d) {
  return monomial_vector(z, MultiIndexTable::build(static_cast<int>(z.size()), d, DegreeMode::UpTo));
}

namespace {

// Lexicographic comparison on the raw bytes of (z, weight): a total order that
// does not depend on the input permutation.
bool byte_key_less(const Vector &za, double wa, const Vector &zb, double wb) {
  const int c = std::memcmp(za.data(), zb.data(), sizeof(double) * static_cast<std::size_t>(za.size()));
  if (c != 0)
    return c < 0;
  return std::memcmp(&wa, &wb, sizeof(double)) < 0;
}

} // namespace

Matrix moment_matrix(std::span<const double> weights, const std::vector<Vector> &atoms, int d) {
  if (atoms.empty())
    throw std::invalid_argument("moment matrix needs at least one atom");
  if (weights.size() != atoms.size())
    throw std::invalid_argument("weights and atoms differ in length");
  const auto n = atoms.front().size();
  if (n < 1)
    throw std::invalid_argument("atoms must have positive dimension");
  for (const auto &z : atoms) {
    if (z.size() != n)
      throw std::invalid_argument("atoms differ in dimension");
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return byte_key_less(atoms[a], weights[a], atoms[b], weights[b]);
  });

  const auto table = MultiIndexTable::build(static_cast<int>(n), d, DegreeMode::UpTo);
  const auto N = static_cast<Eigen::Index>(table.size());
  Matrix X = Matrix::Zero(N, N);
  for (std::size_t idx : order) {
    const Vector m = monomial_vector(std::span<const double>(atoms[idx].data(), static_cast<std::size_t>(n)), table);
    const double w = weights[idx];
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i)
        X(i, j) += w * (m[i] * m[j]);
    }
  }
  X.triangularView<Eigen::StrictlyLower>() = X.transpose().triangularView<Eigen::StrictlyLower>();
  return X;
}

int theoretical_atom_bound(int n, int d) {
  if (n < 1 || d < 1)
    throw std::invalid_argument("atom bound needs n >= 1 and d >= 1");
  const auto N = static_cast<__int128>(binomial(static_cast<std::uint64_t>(n + d), static_cast<std::uint64_t>(d)));
  const auto K = static_cast<__int128>(binomial(static_cast<std::uint64_t>(n + 2 * d), static_cast<std::uint64_t>(2 * d)));
  // (N + 1)/2 - K/N = ((N + 1) N - 2K) / (2N)
  const __int128 numerator = (N + 1) * N - 2 * K;
  if (numerator <= 0)
    return 0;
  return static_cast<int>(numerator / (2 * N));
}

bool Instance::has_tiny_weight() const {
  return std::any_of(weights.begin(), weights.end(), [](double c) { return c < 1e-6; });
}

Instance random_instance(int n, int d, int s, std::uint64_t seed) {
  if (s < 1)
    throw std::invalid_argument("instance needs at least one atom");
  if (n < 1 || d < 1)
    throw std::invalid_argument("instance needs n >= 1 and d >= 1");

  Instance inst;
  inst.n = n;
  inst.d = d;
  inst.seed = seed;
  Rng rng(seed);
  inst.weights.resize(static_cast<std::size_t>(s));
  inst.atoms.reserve(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    inst.weights[static_cast<std::size_t>(i)] = rng.uniform();
    Vector z(n);
    for (int k = 0; k < n; ++k)
      z[k] = rng.uniform(-1.0, 1.0);
    inst.atoms.push_back(std::move(z));
  }
  inst.X = moment_matrix(inst.weights, inst.atoms, d);
  return inst;
}

} // namespace momentray
