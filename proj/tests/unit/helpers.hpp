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

#include "momentray/random.hpp"
#include "momentray/types.hpp"

namespace momentray::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  Matrix A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      A(i, j) = rng.normal();
  return A;
}

inline Matrix random_symmetric(Eigen::Index n, Rng &rng) {
  const Matrix A = random_matrix(n, n, rng);
  return (A + A.transpose()) / 2.0;
}

inline Matrix random_orthogonal(Eigen::Index n, Rng &rng) {
  return random_matrix(n, n, rng).householderQr().householderQ();
}

inline double min_eig(const Matrix &X) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(X, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

} // namespace momentray::testing
