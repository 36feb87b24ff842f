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
#include <string>
#include <utility>
#include <vector>

#include "qnm/complex_matrix.hpp"
#include "qnm/dynamics.hpp"
#include "qnm/errors.hpp"

namespace qnm {

/// Radius of the hard exclusion window around the poles of the rate tan 2tau,
/// tau_s = pi/4 + k*pi/2, applied by every generator-based operation. The
/// dynamical map itself stays regular there.
inline constexpr double kSingularExclusion = 1e-3;

inline double nearest_singular_tau(double tau) {
  const double k = std::round((tau - kPi / 4.0) / (kPi / 2.0));
  return kPi / 4.0 + k * (kPi / 2.0);
}

inline bool inside_singular_window(double tau,
                                   double delta = kSingularExclusion) {
  return std::abs(tau - nearest_singular_tau(tau)) < delta;
}

inline void require_outside_singular_window(
    double tau, double delta, const char* who) {
  if (inside_singular_window(tau, delta))
    throw SingularityError(tau, nearest_singular_tau(tau),
                           std::string(who) + ": tan 2tau diverges here");
}

enum class GeneratorKind { kNondissipative, kDissipative, kReconstructed };

/// Time-local superoperator L(tau) as a 4x4 matrix acting on the
/// column-stacked state. Trace- and Hermiticity-preserving by construction.
struct Generator {
  ComplexMatrix action{4};
  double tau = 0.0;
  GeneratorKind kind = GeneratorKind::kNondissipative;
  double gamma = 0.0;  // dimensionless decay rate, 0 unless dissipative

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    return devectorize(matvec(action, vectorize(rho)));
  }
};

/// Superoperator matrix of rho -> A rho B in the column-stacking convention.
inline ComplexMatrix sandwich_action(const ComplexMatrix& a,
                                     const ComplexMatrix& b) {
  return kron(b.transpose(), a);
}

/// Superoperator matrix of the dissipator rho -> L rho L^dag - {L^dag L, rho}/2.
inline ComplexMatrix dissipator_action(const ComplexMatrix& op) {
  const ComplexMatrix gram = op.adjoint() * op;
  const ComplexMatrix id = ComplexMatrix::identity(op.dim());
  return sandwich_action(op, op.adjoint()) -
         0.5 * (sandwich_action(gram, id) + sandwich_action(id, gram));
}

/// rho -> tan 2tau (sigma_y rho sigma_y - rho).
inline Generator generator_nondissipative(double tau,
                                          double delta = kSingularExclusion) {
  require_outside_singular_window(tau, delta, "generator_nondissipative");
  const double rate = std::tan(2.0 * tau);
  Generator g;
  g.tau = tau;
  g.kind = GeneratorKind::kNondissipative;
  g.action = rate * (sandwich_action(pauli_y(), pauli_y()) -
                     ComplexMatrix::identity(4));
  return g;
}

/// Nondissipative part plus population damping at dimensionless rate gamma:
/// rho -> tan 2tau (sigma_y rho sigma_y - rho)
///        + gamma (sigma_- rho sigma_+ - {sigma_+ sigma_-, rho}/2).
inline Generator generator_dissipative(double tau, double gamma,
                                       double delta = kSingularExclusion) {
  if (gamma < 0.0)
    throw ParameterError("gamma", "decay rate must be non-negative, got " +
                                      std::to_string(gamma));
  require_outside_singular_window(tau, delta, "generator_dissipative");
  Generator g = generator_nondissipative(tau, delta);
  g.kind = GeneratorKind::kDissipative;
  g.gamma = gamma;
  g.action += gamma * dissipator_action(sigma_minus());
  return g;
}

/// Orthonormal operator basis G_k = sigma_k / sqrt(2), k = 0..3
/// (sigma_0 = identity).
inline const std::array<ComplexMatrix, 4>& normalized_pauli_basis() {
  static const std::array<ComplexMatrix, 4> basis = {
      identity2() * (1.0 / std::sqrt(2.0)), pauli_x() * (1.0 / std::sqrt(2.0)),
      pauli_y() * (1.0 / std::sqrt(2.0)), pauli_z() * (1.0 / std::sqrt(2.0))};
  return basis;
}

/// Jump-operator basis {|2><2|, |1><1|, |2><1|, |1><2|}
/// = {sigma_+ sigma_-, sigma_- sigma_+, sigma_+, sigma_-}.
inline const std::array<ComplexMatrix, 4>& jump_basis() {
  static const std::array<ComplexMatrix, 4> basis = {
      sigma_plus() * sigma_minus(), sigma_minus() * sigma_plus(), sigma_plus(),
      sigma_minus()};
  return basis;
}

/// Intermediate matrices of the map -> master-equation construction:
/// F_kl = Tr[G_k Lambda(tau,0)(G_l)], its derivative, and the coefficient
/// matrix R of L(rho) = sum_ab R_ab tau_a rho tau_b^dag in the jump basis.
struct ReconstructionMatrices {
  ComplexMatrix F{4};
  ComplexMatrix Fdot{4};
  ComplexMatrix R{4};
  std::array<ComplexMatrix, 4> pauli_basis = normalized_pauli_basis();
  std::array<ComplexMatrix, 4> jump_ops = jump_basis();
};

/// Reconstruct the time-local generator at tau from the dynamical map:
/// build F from the map, form Fdot F^{-1}, assemble R, and return
/// L(rho) = sum_ab R_ab tau_a rho tau_b^dag as a Generator.
///
/// Fdot uses the model's closed form diag(0, -2 sin 2tau, 0, -2 sin 2tau)
/// and is cross-checked against a central difference of the map-built F;
/// a map outside this family fails the cross-check.
inline std::pair<ReconstructionMatrices, Generator> reconstruct_generator_from_map(
    const EnsembleMap& map, double tau) {
  if (std::abs(std::cos(2.0 * tau)) <= 1e-6)
    throw SingularityError(tau, nearest_singular_tau(tau),
                           "reconstruct_generator_from_map: F(tau) is not "
                           "invertible");

  ReconstructionMatrices mats;
  const auto& g = mats.pauli_basis;
  const auto& jump = mats.jump_ops;

  // F_kl = Tr[G_k Lambda(G_l)]: the map is applied to the column-index
  // basis element.
  auto build_f = [&](double t) {
    ComplexMatrix f(4);
    for (std::size_t l = 0; l < 4; ++l) {
      const ComplexMatrix mapped = map.apply(t, g[l]);
      for (std::size_t k = 0; k < 4; ++k) f(k, l) = (g[k] * mapped).trace();
    }
    return f;
  };
  mats.F = build_f(tau);

  mats.Fdot = ComplexMatrix(4);
  mats.Fdot(1, 1) = mats.Fdot(3, 3) = -2.0 * std::sin(2.0 * tau);

  const double h = 1e-6;
  const ComplexMatrix fdot_numeric =
      (build_f(tau + h) - build_f(tau - h)) * (1.0 / (2.0 * h));
  const double mismatch = mats.Fdot.max_abs_diff(fdot_numeric);
  if (mismatch > 1e-6)
    throw ConvergenceError(
        "reconstruct_generator_from_map: analytic Fdot disagrees with the "
        "central difference of the map-built F by " + std::to_string(mismatch));

  const ComplexMatrix fdot_finv = mats.Fdot * inverse(mats.F);

  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      cplx sum{};
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t s = 0; s < 4; ++s) {
          const cplx weight = fdot_finv(r, s);
          if (weight == cplx{}) continue;
          sum += weight *
                 (g[r] * jump[a].adjoint() * g[s] * jump[b]).trace();
        }
      mats.R(a, b) = sum;
    }

  Generator gen;
  gen.tau = tau;
  gen.kind = GeneratorKind::kReconstructed;
  gen.action = ComplexMatrix(4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      if (mats.R(a, b) == cplx{}) continue;
      gen.action += mats.R(a, b) * sandwich_action(jump[a], jump[b].adjoint());
    }
  return {std::move(mats), std::move(gen)};
}

struct CanonicalChannel {
  double rate;            // gamma_k(tau)
  ComplexMatrix op{2};    // traceless, unit Hilbert-Schmidt norm
};

/// Canonical (Lindblad-type) form: orthogonal decay channels with real rates.
struct CanonicalForm {
  std::vector<CanonicalChannel> channels;  // rates sorted descending

  ComplexMatrix reassembled_action() const {
    ComplexMatrix m(4);
    for (const CanonicalChannel& ch : channels)
      m += ch.rate * dissipator_action(ch.op);
    return m;
  }
};

namespace detail {

inline cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.adjoint() * b).trace();
}

inline void require_preserving(const Generator& gen) {
  const double scale = std::max(1.0, gen.action.max_abs());
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexMatrix unit(2);
      unit(i, j) = 1.0;
      const ComplexMatrix image = gen.apply(unit);
      if (std::abs(image.trace()) > 1e-10 * scale)
        throw InvariantViolation(
            "canonical_decompose: generator is not trace-preserving");
    }
  const std::array<ComplexMatrix, 4> herm_basis = {
      identity2(), pauli_x(), pauli_y(), pauli_z()};
  for (const ComplexMatrix& h : herm_basis) {
    if (gen.apply(h).hermiticity_defect() > 1e-10 * scale)
      throw InvariantViolation(
          "canonical_decompose: generator is not Hermiticity-preserving");
  }
}

}  // namespace detail

/// Extract the Kossakowski coefficient matrix of the generator in the
/// orthonormal traceless basis {sigma_x, sigma_y, sigma_z}/sqrt(2) and
/// diagonalize it. Restricting the coefficient matrix to the traceless
/// sector discards the trace and Hamiltonian (commutator) components, so
/// the returned channels are purely dissipative.
inline CanonicalForm canonical_decompose(const Generator& gen) {
  detail::require_preserving(gen);

  const auto& g = normalized_pauli_basis();
  ComplexMatrix coeff(3);
  for (std::size_t j = 1; j < 4; ++j)
    for (std::size_t k = 1; k < 4; ++k) {
      const ComplexMatrix basis_action =
          sandwich_action(g[j], g[k]);  // rho -> G_j rho G_k
      coeff(j - 1, k - 1) = detail::hs_inner(basis_action, gen.action);
    }
  coeff = (coeff + coeff.adjoint()) * 0.5;

  const EigenSystem es = hermitian_eigen(coeff);
  CanonicalForm form;
  for (std::size_t k = 0; k < 3; ++k) {
    CanonicalChannel ch;
    ch.rate = es.values[k];
    ch.op = ComplexMatrix(2);
    for (std::size_t j = 0; j < 3; ++j) ch.op += es.vectors(j, k) * g[j + 1];
    form.channels.push_back(std::move(ch));
  }
  return form;
}

/// Closed-form canonical rates of the damped generator:
/// (gamma + 2 tan 2tau +- sqrt(gamma^2 + 4 tan^2 2tau)) / 2,
/// returned as (plus, minus).
inline std::pair<double, double> ach_rates_analytic(
    double tau, double gamma, double delta = kSingularExclusion) {
  if (gamma < 0.0)
    throw ParameterError("gamma", "decay rate must be non-negative");
  require_outside_singular_window(tau, delta, "ach_rates_analytic");
  const double t = std::tan(2.0 * tau);
  const double root = std::sqrt(gamma * gamma + 4.0 * t * t);
  return {(gamma + 2.0 * t + root) / 2.0, (gamma + 2.0 * t - root) / 2.0};
}

/// Closed-form canonical channel operators L_+- for gamma > 0, unit
/// Hilbert-Schmidt norm; defined up to a phase relative to the
/// eigenvectors returned by canonical_decompose.
inline std::pair<ComplexMatrix, ComplexMatrix> ach_operators_analytic(
    double tau, double gamma, double delta = kSingularExclusion) {
  if (gamma <= 0.0)
    throw ParameterError("gamma",
                         "channel operators are only defined for gamma > 0");
  require_outside_singular_window(tau, delta, "ach_operators_analytic");
  const double t = std::tan(2.0 * tau);
  const double root = std::sqrt(gamma * gamma + 4.0 * t * t);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  auto channel = [&](double sign) {
    const double den =
        std::sqrt(gamma * gamma +
                  (2.0 * t - sign * root) * (2.0 * t - sign * root));
    const cplx u1 = cplx(0.0, 1.0) * ((-2.0 * t + sign * root) / den);
    const double u2 = gamma / den;
    return (u1 * pauli_x() + u2 * pauli_y()) * inv_sqrt2;
  };
  return {channel(+1.0), channel(-1.0)};
}

}  // namespace qnm
