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

#include <cmath>

#include "doctest.h"
#include "qnm/dynamics.hpp"
#include "test_helpers.hpp"

using namespace qnm;
using qnm_test::make_rng;
using qnm_test::random_density;

TEST_CASE("unitary_at: fixed matrices") {
  CHECK(unitary_at(1, 0.0).max_abs_diff(identity2()) <= 1e-15);

  const double r = std::sqrt(0.5);
  CHECK(unitary_at(1, kPi / 4.0)
            .max_abs_diff(ComplexMatrix::from_rows({{r, r}, {-r, r}})) <=
        1e-15);
  // phi = pi flips the sign of the off-diagonal entries
  CHECK(unitary_at(2, kPi / 4.0)
            .max_abs_diff(ComplexMatrix::from_rows({{r, -r}, {r, r}})) <=
        1e-15);

  CHECK_THROWS_AS(unitary_at(0, 0.1), ParameterError);
  CHECK_THROWS_AS(unitary_at(3, 0.1), ParameterError);
}

TEST_CASE("unitary_at: unitarity and small-time expansion") {
  auto rng = make_rng(21);
  std::uniform_real_distribution<double> dist(-2.0 * kPi, 2.0 * kPi);
  for (int it = 0; it < 50; ++it) {
    const double tau = dist(rng);
    for (int branch : {1, 2}) {
      const ComplexMatrix u = unitary_at(branch, tau);
      CHECK((u.adjoint() * u).max_abs_diff(identity2()) <= 1e-12);
    }
  }

  // U_i(tau) = exp(-i H_i tau) with H_i = i (sigma_+ e^{-i phi_i}
  // - sigma_- e^{i phi_i}); first order in tau must match
  const double tau = 1e-4;
  for (int branch : {1, 2}) {
    const double phi = (branch == 1) ? 0.0 : kPi;
    const cplx em = {std::cos(phi), -std::sin(phi)};
    const ComplexMatrix h =
        cplx{0.0, 1.0} * (em * sigma_plus() - std::conj(em) * sigma_minus());
    const ComplexMatrix first_order =
        identity2() - cplx{0.0, tau} * h;
    CHECK(unitary_at(branch, tau).max_abs_diff(first_order) <= 2.0 * tau * tau);
  }
}

TEST_CASE("QubitState: invariants enforced") {
  CHECK_THROWS_AS(QubitState(ComplexMatrix::from_rows({{0.5, 0.3}, {0.0, 0.5}})),
                  InvariantViolation);  // not Hermitian
  CHECK_THROWS_AS(QubitState(ComplexMatrix::from_rows({{0.7, 0.0}, {0.0, 0.7}})),
                  InvariantViolation);  // trace != 1
  CHECK_THROWS_AS(QubitState(ComplexMatrix::from_rows({{1.2, 0.0}, {0.0, -0.2}})),
                  InvariantViolation);  // negative eigenvalue
  CHECK_THROWS_AS(QubitState(ComplexMatrix::identity(4)), DimensionError);

  const QubitState plus = QubitState::from_bloch(1.0, 0.0, 0.0);
  CHECK(plus.matrix()(0, 1).real() == doctest::Approx(0.5));
}

TEST_CASE("apply_map: fixed actions") {
  // unital: the maximally mixed state is a fixed point at every tau
  for (double tau : {0.0, 0.3, kPi / 4.0, 1.2, 2.9}) {
    const QubitState out = apply_map(tau, QubitState::maximally_mixed());
    CHECK(out.matrix().max_abs_diff(identity2() * 0.5) <= 1e-14);
  }

  // averaging the two conjugations cancels the off-diagonals:
  // diag(1,0) -> diag(cos^2 tau, sin^2 tau)
  for (double tau : {0.2, 0.9, kPi / 4.0}) {
    const QubitState out = apply_map(tau, QubitState::excited());
    const double c2 = std::cos(tau) * std::cos(tau);
    CHECK(std::abs(out.matrix()(0, 0).real() - c2) <= 1e-14);
    CHECK(std::abs(out.matrix()(1, 1).real() - (1.0 - c2)) <= 1e-14);
    CHECK(std::abs(out.matrix()(0, 1)) <= 1e-14);
  }
  const QubitState half = apply_map(kPi / 4.0, QubitState::excited());
  CHECK(std::abs(half.matrix()(0, 0).real() - 0.5) <= 1e-14);
}

TEST_CASE("apply_map: CPTP, Bloch action, periodicity") {
  auto rng = make_rng(22);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);
  for (int it = 0; it < 60; ++it) {
    const double tau = dist(rng);
    const QubitState rho = random_density(rng);
    const QubitState evolved = apply_map(tau, rho);

    CHECK(std::abs(evolved.matrix().trace() - cplx{1.0, 0.0}) <= 1e-12);
    CHECK(evolved.matrix().hermiticity_defect() <= 1e-12);
    CHECK(hermitian_eigen(evolved.matrix()).values.back() >= -1e-12);

    const auto [x, y, z] = rho.bloch();
    const auto [xe, ye, ze] = evolved.bloch();
    const double c = std::cos(2.0 * tau);
    CHECK(std::abs(xe - c * x) <= 1e-12);
    CHECK(std::abs(ye - y) <= 1e-12);
    CHECK(std::abs(ze - c * z) <= 1e-12);

    const QubitState shifted = apply_map(tau + kPi, rho);
    CHECK(shifted.matrix().max_abs_diff(evolved.matrix()) <= 1e-12);
  }
}

TEST_CASE("EnsembleMap: probability invariants") {
  using Branch = EnsembleMap::Branch;
  CHECK_THROWS_AS(
      EnsembleMap(std::vector<Branch>{
          {0.7, [](double t) { return unitary_at(1, t); }},
          {0.7, [](double t) { return unitary_at(2, t); }}}),
      InvariantViolation);
  CHECK_THROWS_AS(
      EnsembleMap(std::vector<Branch>{
          {1.4, [](double t) { return unitary_at(1, t); }},
          {-0.4, [](double t) { return unitary_at(2, t); }}}),
      InvariantViolation);
  // non-unitary branch caught on use
  const EnsembleMap bad(std::vector<Branch>{
      {1.0, [](double) { return pauli_x() * 2.0; }}});
  CHECK_THROWS_AS(bad.apply(0.1, identity2()), InvariantViolation);
}

TEST_CASE("choi_of_map: reference state, positivity, convex structure") {
  const ComplexMatrix at_zero = choi_of_map(0.0);
  CHECK(at_zero.max_abs_diff(bell_state()) <= 1e-15);
  const EigenSystem es0 = hermitian_eigen(at_zero);
  CHECK(es0.values[0] == doctest::Approx(1.0));
  CHECK(std::abs(es0.values[1]) <= 1e-13);
  CHECK(std::abs(es0.values[3]) <= 1e-13);

  for (int k = 1; k <= 40; ++k) {
    const double tau = kPi * k / 40.0;
    const ComplexMatrix choi = choi_of_map(tau);
    CHECK(std::abs(choi.trace() - cplx{1.0, 0.0}) <= 1e-13);
    CHECK(choi.hermiticity_defect() <= 1e-13);
    CHECK(hermitian_eigen(choi).values.back() >= -1e-12);
  }

  // at any tau the Choi state is the average of the two rank-1 unitary
  // Choi states, built here from scratch
  const double tau = kPi / 4.0;
  ComplexMatrix average(4);
  for (int branch : {1, 2}) {
    const ComplexMatrix ext = kron(unitary_at(branch, tau), identity2());
    average += 0.5 * (ext * bell_state() * ext.adjoint());
  }
  CHECK(choi_of_map(tau).max_abs_diff(average) <= 1e-14);
}
