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

#include "doctest.h"
#include "helpers.hpp"

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

using namespace momentray;
using momentray::testing::min_eig;

namespace {

/// Constraint count from first principles: enumerate upper-triangle pairs,
/// group them by the sum of their exponents and count one constraint per
/// extra member of each group.
std::size_t pair_enumeration_count(int n, int d) {
  const auto table = MultiIndexTable::build(n, d, DegreeMode::UpTo);
  std::map<MultiIndex, std::size_t> groups;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = i; j < table.size(); ++j)
      ++groups[add(table[i], table[j])];
  std::size_t m = 0;
  for (const auto &[gamma, size] : groups)
    m += size - 1;
  return m;
}

Matrix chain_block(std::size_t q) {
  Matrix T = Matrix::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    T(i, i) = 2.0;
    if (i + 1 < T.rows())
      T(i, i + 1) = T(i + 1, i) = -1.0;
  }
  return T;
}

MultiIndex pair_sum(const ConstraintSystem &sys, const EntryPos &p) {
  return add(sys.table()[p.row], sys.table()[p.col]);
}

} // namespace

TEST_CASE("monomial vector of a point in the plane") {
  const std::array<double, 2> z{2.0, 3.0};
  const Vector m = monomial_vector(z, 2);
  CHECK(m.size() == 6);
  const std::array<double, 6> expected{1, 2, 3, 4, 6, 9};
  for (int i = 0; i < 6; ++i)
    CHECK(m[i] == expected[static_cast<std::size_t>(i)]);
}

TEST_CASE("monomial vector of the origin and of the all-ones point") {
  const std::array<double, 3> zero{0.0, 0.0, 0.0};
  const Vector m0 = monomial_vector(zero, 2);
  CHECK(m0.size() == 10);
  CHECK(m0[0] == 1.0);
  CHECK(m0.tail(9).isZero(0.0));
  const std::array<double, 2> ones{1.0, 1.0};
  CHECK(monomial_vector(ones, 2) == Vector::Ones(6));
}

TEST_CASE("monomial vector rejects points of the wrong dimension") {
  const auto table = MultiIndexTable::build(2, 2, DegreeMode::UpTo);
  const std::array<double, 3> z{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(monomial_vector(z, table), std::invalid_argument);
}

TEST_CASE("moment matrix of a single atom at the origin is the corner unit matrix") {
  const std::vector<double> w{1.0};
  const std::vector<Vector> atoms{Vector::Zero(3)};
  const Matrix X = moment_matrix(w, atoms, 2);
  Matrix E = Matrix::Zero(10, 10);
  E(0, 0) = 1.0;
  CHECK(X == E);
}

TEST_CASE("moment matrix of one univariate atom") {
  const std::vector<double> w{0.5};
  const std::vector<Vector> atoms{Vector::Constant(1, 2.0)};
  const Matrix X = moment_matrix(w, atoms, 2);
  Vector m(3);
  m << 1, 2, 4;
  CHECK((X - 0.5 * m * m.transpose()).norm() == 0.0);
  CHECK(X(2, 2) == 8.0);
}

TEST_CASE("moment matrix is bit-identical under joint permutation of atoms") {
  Rng rng(11);
  std::vector<double> w;
  std::vector<Vector> atoms;
  for (int i = 0; i < 5; ++i) {
    w.push_back(rng.uniform());
    atoms.push_back(Vector::NullaryExpr(3, [&] { return rng.uniform(-1.0, 1.0); }));
  }
  const Matrix X = moment_matrix(w, atoms, 2);
  const std::vector<std::size_t> perm{3, 0, 4, 2, 1};
  std::vector<double> pw;
  std::vector<Vector> pa;
  for (auto k : perm) {
    pw.push_back(w[k]);
    pa.push_back(atoms[k]);
  }
  const Matrix Y = moment_matrix(pw, pa, 2);
  CHECK(X == Y);
  CHECK(X == X.transpose());
}

TEST_CASE("moment matrix rejects malformed atom lists") {
  const std::vector<double> none;
  CHECK_THROWS_AS(moment_matrix(none, {}, 2), std::invalid_argument);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(moment_matrix(two, {Vector::Zero(2)}, 2), std::invalid_argument);
  CHECK_THROWS_AS(moment_matrix(two, {Vector::Zero(2), Vector::Zero(3)}, 2), std::invalid_argument);
}

TEST_CASE("Hankel constraint count for three variables, degree two") {
  const auto sys = ConstraintSystem::hankel(3, 2);
  CHECK(sys.dimension() == 10);
  CHECK(sys.size() == 20);
  CHECK(sys.size() == pair_enumeration_count(3, 2));
  CHECK(sys.size() == 55 - binomial(7, 4));
}

TEST_CASE("Hankel system of one variable, degree one, is empty") {
  const auto sys = ConstraintSystem::hankel(1, 1);
  CHECK(sys.dimension() == 2);
  CHECK(sys.size() == 0);
  CHECK(pair_enumeration_count(1, 1) == 0);
}

TEST_CASE("Hankel systems reject degenerate sizes") {
  CHECK_THROWS_AS(ConstraintSystem::hankel(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintSystem::hankel(2, 0), std::invalid_argument);
}

TEST_CASE("constraint count plus moment count fills the upper triangle") {
  for (int n = 1; n <= 5; ++n) {
    for (int d = 1; d <= 3; ++d) {
      CAPTURE(n);
      CAPTURE(d);
      const auto sys = ConstraintSystem::hankel(n, d);
      const std::size_t N = sys.dimension();
      const auto moments = binomial(static_cast<std::uint64_t>(n + 2 * d), static_cast<std::uint64_t>(2 * d));
      CHECK(sys.size() + moments == N * (N + 1) / 2);
      CHECK(sys.size() == pair_enumeration_count(n, d));
    }
  }
}

TEST_CASE("constraint rows are chains on distinct upper-triangle entries") {
  for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}, {4, 2}}) {
    const auto sys = ConstraintSystem::hankel(n, d);
    std::set<std::pair<std::size_t, std::size_t>> seen_support;
    std::size_t covered = 0;
    for (const auto &group : sys.groups()) {
      std::set<std::pair<std::size_t, std::size_t>> support;
      for (std::size_t k = 0; k < group.count; ++k) {
        const auto &row = sys.rows()[group.first_row + k];
        CHECK(row.plus.row <= row.plus.col);
        CHECK(row.minus.row <= row.minus.col);
        CHECK_FALSE(row.plus == row.minus);
        CHECK(pair_sum(sys, row.plus) == group.gamma);
        CHECK(pair_sum(sys, row.minus) == group.gamma);
        support.insert({row.plus.row, row.plus.col});
        support.insert({row.minus.row, row.minus.col});
        if (k > 0) {
          const auto &prev = sys.rows()[group.first_row + k - 1];
          const bool shares = prev.plus == row.plus || prev.plus == row.minus ||
                              prev.minus == row.plus || prev.minus == row.minus;
          CHECK(shares);
        }
      }
      CHECK(support.size() == group.count + 1);
      for (const auto &p : support)
        CHECK(seen_support.insert(p).second);
      covered += group.count;
    }
    CHECK(covered == sys.size());
  }
}

TEST_CASE("Gram matrix of the chain rows is block diagonal with tridiagonal blocks") {
  for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}}) {
    const auto sys = ConstraintSystem::hankel(n, d);
    const auto m = static_cast<Eigen::Index>(sys.size());
    Matrix expected = Matrix::Zero(m, m);
    for (const auto &group : sys.groups()) {
      const auto first = static_cast<Eigen::Index>(group.first_row);
      const auto q = static_cast<Eigen::Index>(group.count);
      expected.block(first, first, q, q) = chain_block(group.count);
    }
    CHECK((sys.dense_gram() - expected).norm() == 0.0);
  }
}

TEST_CASE("functional matrices evaluate the constraint rows") {
  const auto sys = ConstraintSystem::hankel(3, 2);
  Rng rng(3);
  const Matrix X = momentray::testing::random_symmetric(10, rng);
  const Vector a = sys.apply(X);
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto &row = sys.rows()[i];
    const double direct = X(static_cast<Eigen::Index>(row.plus.row), static_cast<Eigen::Index>(row.plus.col)) -
                          X(static_cast<Eigen::Index>(row.minus.row), static_cast<Eigen::Index>(row.minus.col));
    CHECK(a[static_cast<Eigen::Index>(i)] == doctest::Approx(direct).epsilon(1e-14));
    CHECK((sys.functional_matrix(i).cwiseProduct(X)).sum() == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("adjoint is the transpose of apply in triangle coordinates") {
  const auto sys = ConstraintSystem::hankel(2, 3);
  Rng rng(5);
  const auto N = static_cast<Eigen::Index>(sys.dimension());
  const Matrix X = momentray::testing::random_symmetric(N, rng);
  const Vector y = Vector::NullaryExpr(static_cast<Eigen::Index>(sys.size()), [&] { return rng.normal(); });
  const Matrix Aty = sys.adjoint(y);
  CHECK((Aty - Aty.transpose()).norm() == 0.0);
  double upper = 0.0;
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      upper += Aty(i, j) * X(i, j);
  CHECK(upper == doctest::Approx(sys.apply(X).dot(y)).epsilon(1e-12));
}

TEST_CASE("theoretical atom bound") {
  CHECK(theoretical_atom_bound(3, 2) == 2);
  CHECK(theoretical_atom_bound(5, 3) == 20);
  CHECK(theoretical_atom_bound(4, 1) == 0);
  const std::vector<std::array<int, 3>> table{{3, 2, 2},  {4, 2, 3},  {5, 2, 5}, {6, 2, 7},
                                              {7, 2, 9},  {8, 2, 12}, {9, 2, 15}, {10, 2, 18},
                                              {2, 3, 2},  {3, 3, 6},  {4, 3, 12}, {5, 3, 20}};
  for (const auto &[n, d, bound] : table) {
    CAPTURE(n);
    CAPTURE(d);
    CHECK(theoretical_atom_bound(n, d) == bound);
  }
  CHECK_THROWS_AS(theoretical_atom_bound(0, 2), std::invalid_argument);
}

TEST_CASE("theoretical atom bound is never negative") {
  for (int n = 1; n <= 8; ++n)
    for (int d = 1; d <= 4; ++d)
      CHECK(theoretical_atom_bound(n, d) >= 0);
}

TEST_CASE("Hankel residual of simple matrices") {
  const auto sys = ConstraintSystem::hankel(3, 2);
  CHECK(hankel_residual(Matrix::Zero(10, 10), sys) == 0.0);
  CHECK(hankel_residual(Matrix::Identity(10, 10), sys) > 0.5);
  CHECK_THROWS_AS(hankel_residual(Matrix::Zero(9, 9), sys), std::invalid_argument);
}

TEST_CASE("random instances are reproducible") {
  const auto a = random_instance(3, 2, 4, 42);
  const auto b = random_instance(3, 2, 4, 42);
  CHECK(a.X == b.X);
  CHECK(a.weights == b.weights);
  for (std::size_t i = 0; i < a.atoms.size(); ++i)
    CHECK(a.atoms[i] == b.atoms[i]);
  CHECK(random_instance(3, 2, 4, 43).X != a.X);
}

TEST_CASE("random instances satisfy the moment-matrix invariants") {
  for (int s : {1, 2, 5, 8}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = random_instance(3, 2, s, seed);
      const auto sys = ConstraintSystem::hankel(3, 2);
      CHECK(hankel_residual(inst.X, sys) <= 1e-12);
      CHECK(min_eig(inst.X) >= -1e-10);
      Matrix direct = Matrix::Zero(10, 10);
      for (std::size_t i = 0; i < inst.atoms.size(); ++i) {
        const Vector m = monomial_vector(inst.atoms[i], 2);
        direct += inst.weights[i] * m * m.transpose();
      }
      CHECK((inst.X - direct).norm() <= 1e-12 * direct.norm());
      for (double w : inst.weights) {
        CHECK(w >= 0.0);
        CHECK(w < 1.0);
      }
      for (const auto &z : inst.atoms)
        CHECK(z.cwiseAbs().maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("generic instances have rank equal to the atom count") {
  const auto N = static_cast<int>(binomial(5, 2));
  for (int s = 1; s <= N - 2; ++s) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto inst = random_instance(3, 2, s, seed);
      if (inst.has_tiny_weight())
        continue;
      const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(inst.X).eigenvalues();
      CAPTURE(s);
      CHECK((ev.array() > 1e-8).count() == s);
    }
  }
}

TEST_CASE("random instances reject empty or degenerate requests") {
  CHECK_THROWS_AS(random_instance(3, 2, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_instance(0, 2, 1, 1), std::invalid_argument);
}

TEST_CASE("tiny-weight flag") {
  Instance inst;
  inst.weights = {0.5, 1e-7};
  CHECK(inst.has_tiny_weight());
  inst.weights = {0.5, 1e-3};
  CHECK_FALSE(inst.has_tiny_weight());
}
