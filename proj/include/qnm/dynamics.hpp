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

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "qnm/complex_matrix.hpp"
#include "qnm/errors.hpp"

namespace qnm {

inline constexpr double kPi = std::numbers::pi;

// Qubit operator constants. Basis ordering: index 0 is the excited level,
// index 1 the ground level, so sigma_minus lowers 0 -> 1.
inline const ComplexMatrix& identity2() {
  static const ComplexMatrix m = ComplexMatrix::identity(2);
  return m;
}
inline const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m =
      ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  return m;
}
inline const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m =
      ComplexMatrix::from_rows({{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}});
  return m;
}
inline const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m =
      ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  return m;
}
inline const ComplexMatrix& sigma_plus() {
  static const ComplexMatrix m =
      ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  return m;
}
inline const ComplexMatrix& sigma_minus() {
  static const ComplexMatrix m =
      ComplexMatrix::from_rows({{0.0, 0.0}, {1.0, 0.0}});
  return m;
}

/// Bloch components (x, y, z) of a 2x2 matrix: m = (w*I + x*sx + y*sy + z*sz)/2.
inline std::array<double, 3> bloch_of(const ComplexMatrix& m) {
  if (m.dim() != 2) throw DimensionError("bloch_of: expected a 2x2 matrix");
  return {(m * pauli_x()).trace().real(), (m * pauli_y()).trace().real(),
          (m * pauli_z()).trace().real()};
}

inline ComplexMatrix matrix_from_bloch(double x, double y, double z) {
  ComplexMatrix m = identity2();
  m += x * pauli_x();
  m += y * pauli_y();
  m += z * pauli_z();
  return m * 0.5;
}

/// A 2x2 density matrix with its physicality invariants enforced on
/// construction: Hermitian within 1e-12, unit trace within 1e-12, and
/// eigenvalues above -positivity_slack (default 1e-12).
class QubitState {
 public:
  explicit QubitState(ComplexMatrix m, double positivity_slack = 1e-12)
      : m_(std::move(m)) {
    if (m_.dim() != 2)
      throw DimensionError("QubitState: density matrix must be 2x2");
    const double defect = m_.hermiticity_defect();
    if (defect > 1e-12)
      throw InvariantViolation("QubitState: not Hermitian, max|m - m^dag| = " +
                               std::to_string(defect));
    const double trace_err = std::abs(m_.trace() - cplx{1.0, 0.0});
    if (trace_err > 1e-12)
      throw InvariantViolation("QubitState: trace deviates from 1 by " +
                               std::to_string(trace_err));
    const EigenSystem es = hermitian_eigen(m_);
    if (es.values.back() < -positivity_slack)
      throw InvariantViolation("QubitState: negative eigenvalue " +
                               std::to_string(es.values.back()));
  }

  static QubitState excited() {
    return QubitState(ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}));
  }
  static QubitState ground() {
    return QubitState(ComplexMatrix::from_rows({{0.0, 0.0}, {0.0, 1.0}}));
  }
  static QubitState maximally_mixed() {
    return QubitState(identity2() * 0.5);
  }
  static QubitState from_bloch(double x, double y, double z) {
    return QubitState(matrix_from_bloch(x, y, z));
  }

  const ComplexMatrix& matrix() const { return m_; }
  std::array<double, 3> bloch() const { return bloch_of(m_); }

 private:
  ComplexMatrix m_;
};

/// Time-evolution unitary of field branch i in {1, 2} at dimensionless time
/// tau (coupling absorbed): [[cos tau, e^{-i phi} sin tau],
/// [-e^{i phi} sin tau, cos tau]] with phi = 0 for branch 1, pi for branch 2.
inline ComplexMatrix unitary_at(int branch, double tau) {
  if (branch != 1 && branch != 2)
    throw ParameterError("branch", "must be 1 or 2, got " +
                                       std::to_string(branch));
  const double phi = (branch == 1) ? 0.0 : kPi;
  const cplx em = {std::cos(phi), -std::sin(phi)};  // e^{-i phi}
  const cplx ep = std::conj(em);
  const double c = std::cos(tau), s = std::sin(tau);
  return ComplexMatrix::from_rows({{c, em * s}, {-ep * s, c}});
}

/// Probability-weighted family of time-parametrized unitaries realizing a
/// random-unitary dynamical map rho -> sum_i p_i U_i(tau) rho U_i(tau)^dag.
class EnsembleMap {
 public:
  struct Branch {
    double probability;
    std::function<ComplexMatrix(double)> unitary;
  };

  explicit EnsembleMap(std::vector<Branch> branches)
      : branches_(std::move(branches)) {
    double total = 0.0;
    for (const Branch& b : branches_) {
      if (b.probability < 0.0 || b.probability > 1.0)
        throw InvariantViolation("EnsembleMap: branch probability " +
                                 std::to_string(b.probability) +
                                 " outside [0, 1]");
      total += b.probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvariantViolation("EnsembleMap: probabilities sum to " +
                               std::to_string(total));
  }

  /// The two-branch model: random phase 0 or pi, each with probability 1/2.
  static const EnsembleMap& random_external_fields() {
    static const EnsembleMap map(std::vector<Branch>{
        {0.5, [](double tau) { return unitary_at(1, tau); }},
        {0.5, [](double tau) { return unitary_at(2, tau); }}});
    return map;
  }

  /// Linear action on an arbitrary 2x2 matrix (not only states).
  ComplexMatrix apply(double tau, const ComplexMatrix& m) const {
    ComplexMatrix out(m.dim());
    for (const Branch& b : branches_) {
      const ComplexMatrix u = b.unitary(tau);
      const double unitarity =
          (u.adjoint() * u).max_abs_diff(ComplexMatrix::identity(u.dim()));
      if (unitarity > 1e-12)
        throw InvariantViolation("EnsembleMap: branch matrix deviates from "
                                 "unitarity by " + std::to_string(unitarity));
      out += b.probability * (u * m * u.adjoint());
    }
    return out;
  }

  const std::vector<Branch>& branches() const { return branches_; }

 private:
  std::vector<Branch> branches_;
};

inline ComplexMatrix apply_map_matrix(double tau, const ComplexMatrix& m) {
  return EnsembleMap::random_external_fields().apply(tau, m);
}

/// Evolve a state through the random-external-fields map Lambda(tau, 0).
inline QubitState apply_map(double tau, const QubitState& rho) {
  return QubitState(apply_map_matrix(tau, rho.matrix()));
}

/// |Phi><Phi| with |Phi> = (|11> + |22>)/sqrt(2), the fixed maximally
/// entangled reference state (system qubit first, ancilla second).
inline const ComplexMatrix& bell_state() {
  static const ComplexMatrix m = [] {
    ComplexMatrix b(4);
    b(0, 0) = b(0, 3) = b(3, 0) = b(3, 3) = 0.5;
    return b;
  }();
  return m;
}

/// (f tensor id)(|Phi><Phi|) for a linear 2x2 action f: the (normalized)
/// Choi state of f, assembled as (1/2) sum_ij f(E_ij) kron E_ij.
inline ComplexMatrix choi_state_of(
    const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  ComplexMatrix out(4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexMatrix unit(2);
      unit(i, j) = 1.0;
      out += 0.5 * kron(f(unit), unit);
    }
  return out;
}

/// Choi matrix of Lambda(tau, 0); Hermitian, trace one, and positive
/// semidefinite at every tau (the full map is completely positive).
inline ComplexMatrix choi_of_map(double tau) {
  return choi_state_of(
      [tau](const ComplexMatrix& m) { return apply_map_matrix(tau, m); });
}

}  // namespace qnm
