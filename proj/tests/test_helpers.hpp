// Copyright 2026 the qnm authors
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

#include <cmath>
#include <random>
#include <utility>

#include "qnm/complex_matrix.hpp"
#include "qnm/dynamics.hpp"

namespace qnm_test {

using qnm::ComplexMatrix;
using qnm::cplx;

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = cplx{dist(rng), dist(rng)};
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim) {
  const ComplexMatrix m = random_matrix(rng, dim);
  return (m + m.adjoint()) * 0.5;
}

/// Orthonormal eigenvector columns of a random Hermitian matrix form a
/// unitary; good enough as a random unitary source for invariance tests.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t dim) {
  return qnm::hermitian_eigen(random_hermitian(rng, dim)).vectors;
}

inline qnm::QubitState random_density(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (;;) {
    const double x = dist(rng), y = dist(rng), z = dist(rng);
    if (x * x + y * y + z * z <= 1.0)
      return qnm::QubitState::from_bloch(x, y, z);
  }
}

/// Independent 2x2 Hermitian eigenvalue oracle via the characteristic
/// polynomial: lambda = (a+d)/2 +- sqrt(((a-d)/2)^2 + |b|^2).
inline std::pair<double, double> eig2_oracle(const ComplexMatrix& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
  return {mean + rad, mean - rad};
}

}  // namespace qnm_test
