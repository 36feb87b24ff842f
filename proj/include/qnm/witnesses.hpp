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

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qnm/complex_matrix.hpp"
#include "qnm/dynamics.hpp"
#include "qnm/errors.hpp"
#include "qnm/generators.hpp"

namespace qnm {

/// Witness values whose magnitude falls below this are treated as zero when
/// deciding Markovian vs non-Markovian; interval detection needs a crisp
/// predicate.
inline constexpr double kWitnessZeroClamp = 1e-7;

/// Trace distance D = ||rho1 - rho2||_1 / 2; operational distinguishability.
inline double trace_distance(const QubitState& rho1, const QubitState& rho2) {
  return 0.5 * trace_norm(rho1.matrix() - rho2.matrix());
}

/// A pair of initial states
///   rho1 = [[omega, alpha e^{i phi1}], [alpha e^{-i phi1}, 1 - omega]],
///   rho2 = [[mu, beta e^{i phi2}], [beta e^{-i phi2}, 1 - mu]],
/// used to probe distinguishability dynamics. Positivity requires
/// alpha^2 <= omega (1 - omega) and beta^2 <= mu (1 - mu).
class StatePair {
 public:
  StatePair(double omega, double alpha, double phi1, double mu, double beta,
            double phi2)
      : omega_(omega),
        alpha_(alpha),
        phi1_(phi1),
        mu_(mu),
        beta_(beta),
        phi2_(phi2),
        rho1_(build(omega, alpha, phi1, "rho1")),
        rho2_(build(mu, beta, phi2, "rho2")) {}

  /// The orthogonal basis pair diag(1,0), diag(0,1).
  static StatePair canonical() { return StatePair(1, 0, 0, 0, 0, 0); }

  /// Uniformly sampled valid pair, resampled until comfortably
  /// non-degenerate (separation parameter a >= 1e-3).
  static StatePair random(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (;;) {
      const double omega = unit(rng);
      const double alpha = unit(rng) * std::sqrt(omega * (1.0 - omega));
      const double mu = unit(rng);
      const double beta = unit(rng) * std::sqrt(mu * (1.0 - mu));
      StatePair pair(omega, alpha, angle(rng), mu, beta, angle(rng));
      if (pair.separation_parameter() > 1e-3) return pair;
    }
  }

  const QubitState& rho1() const { return rho1_; }
  const QubitState& rho2() const { return rho2_; }

  /// a = (mu - omega)^2 + (alpha cos phi1 - beta cos phi2)^2; the pair is
  /// degenerate for the distinguishability dynamics when a vanishes.
  double separation_parameter() const {
    const double dz = mu_ - omega_;
    const double dx = alpha_ * std::cos(phi1_) - beta_ * std::cos(phi2_);
    return dz * dz + dx * dx;
  }

  double omega() const { return omega_; }
  double alpha() const { return alpha_; }
  double phi1() const { return phi1_; }
  double mu() const { return mu_; }
  double beta() const { return beta_; }
  double phi2() const { return phi2_; }

 private:
  static QubitState build(double pop, double coh, double phi,
                          const char* which) {
    if (pop < 0.0 || pop > 1.0 || coh * coh > pop * (1.0 - pop) + 1e-12)
      throw InvariantViolation(std::string("StatePair: ") + which +
                               " parameters violate positivity");
    const cplx off = coh * cplx{std::cos(phi), std::sin(phi)};
    return QubitState(ComplexMatrix::from_rows(
        {{pop, off}, {std::conj(off), 1.0 - pop}}));
  }

  double omega_, alpha_, phi1_, mu_, beta_, phi2_;
  QubitState rho1_;
  QubitState rho2_;
};

/// BLP witness sigma(tau) = dD/dtau of the evolved pair, by central
/// difference of the exact map evolution; sigma > 0 flags information
/// backflow. The map is regular everywhere, so no singular exclusion
/// applies here.
inline double blp_sigma(const StatePair& pair, double tau, double step = 1e-6) {
  if (tau < step)
    throw DomainError("blp_sigma: tau = " + std::to_string(tau) +
                      " leaves the derivative stencil out of domain");
  const double d_plus =
      trace_distance(apply_map(tau + step, pair.rho1()),
                     apply_map(tau + step, pair.rho2()));
  const double d_minus =
      trace_distance(apply_map(tau - step, pair.rho1()),
                     apply_map(tau - step, pair.rho2()));
  return (d_plus - d_minus) / (2.0 * step);
}

struct SignRegionEntry {
  bool skipped = false;  // degenerate pair (separation parameter ~ 0)
  bool passed = false;
  double worst_tau = 0.0;  // first grid point where the sign law failed
};

struct SignRegionReport {
  std::vector<SignRegionEntry> entries;
  bool all_passed() const {
    for (const auto& e : entries)
      if (!e.skipped && !e.passed) return false;
    return true;
  }
  int skipped_count() const {
    int n = 0;
    for (const auto& e : entries) n += e.skipped ? 1 : 0;
    return n;
  }
};

/// Verify the sign law sign(sigma) = -sign(sin 4tau), which holds for every
/// valid pair with nonzero separation parameter; grid points within 1e-3 of
/// a sign-change point (multiples of pi/4) are left out. Degenerate pairs
/// are reported as skipped, not failed.
inline SignRegionReport blp_sign_region_check(
    const std::vector<StatePair>& pairs, const std::vector<double>& grid) {
  SignRegionReport report;
  for (const StatePair& pair : pairs) {
    SignRegionEntry entry;
    if (pair.separation_parameter() <= 1e-12) {
      entry.skipped = true;
      report.entries.push_back(entry);
      continue;
    }
    entry.passed = true;
    for (double tau : grid) {
      if (tau < 1e-5) continue;  // derivative stencil
      const double quarter = std::abs(
          tau / (kPi / 4.0) - std::round(tau / (kPi / 4.0))) * (kPi / 4.0);
      if (quarter < 1e-3) continue;  // near a sign change of sin 4tau
      const double sigma = blp_sigma(pair, tau);
      const bool expected_positive = std::sin(4.0 * tau) < 0.0;
      if ((sigma > 0.0) != expected_positive) {
        entry.passed = false;
        entry.worst_tau = tau;
        break;
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

/// RHP witness from the one-sided limit
///   g = lim_{eps->0+} (||(1 + eps L x id)|Phi><Phi|||_1 - 1) / eps,
/// evaluated at eps in {1e-4, 1e-5, 1e-6} and Richardson-extrapolated
/// (order 1) to eps -> 0; g > 0 iff the map is indivisible at tau.
inline double rhp_g_numeric(const Generator& gen) {
  ComplexMatrix extended = choi_state_of(
      [&gen](const ComplexMatrix& m) { return gen.apply(m); });
  extended = (extended + extended.adjoint()) * 0.5;  // strip roundoff dust

  const std::array<double, 3> eps = {1e-4, 1e-5, 1e-6};
  std::array<double, 3> quotient{};
  for (std::size_t k = 0; k < 3; ++k) {
    ComplexMatrix perturbed = bell_state() + eps[k] * extended;
    perturbed = (perturbed + perturbed.adjoint()) * 0.5;
    quotient[k] = (trace_norm(perturbed) - 1.0) / eps[k];
  }

  auto richardson = [&](std::size_t i, std::size_t j) {
    return (eps[i] * quotient[j] - eps[j] * quotient[i]) / (eps[i] - eps[j]);
  };
  const double first = richardson(0, 1);
  const double second = richardson(1, 2);
  if (std::abs(first - second) > 1e-4)
    throw ConvergenceError(
        "rhp_g_numeric: extrapolation did not settle; quotients " +
        std::to_string(quotient[0]) + ", " + std::to_string(quotient[1]) +
        ", " + std::to_string(quotient[2]));
  const double g = second;
  return (std::abs(g) < kWitnessZeroClamp) ? 0.0 : g;
}

/// Closed-form RHP witness. gamma = 0: max(-2 tan 2tau, 0). gamma > 0:
///   g = -gamma/2 - g1/2 + (sqrt(2)/4) (gp + gm),
/// g1 = 2 tan 2tau, gpm = sqrt(gamma^2 + (gamma + g1)(g1 +- sqrt(gamma^2 + g1^2))).
inline double rhp_g_analytic(double tau, double gamma,
                             double delta = kSingularExclusion) {
  if (gamma < 0.0)
    throw ParameterError("gamma", "decay rate must be non-negative");
  require_outside_singular_window(tau, delta, "rhp_g_analytic");
  const double g1 = 2.0 * std::tan(2.0 * tau);
  if (gamma == 0.0) return std::max(-g1, 0.0);
  const double root = std::sqrt(gamma * gamma + g1 * g1);
  const double gp = std::sqrt(gamma * gamma + (gamma + g1) * (g1 + root));
  const double gm =
      std::sqrt(std::max(gamma * gamma + (gamma + g1) * (g1 - root), 0.0));
  return -gamma / 2.0 - g1 / 2.0 + (std::sqrt(2.0) / 4.0) * (gp + gm);
}

/// ACH witness f(tau) = min(gamma_-(tau), 0) from the closed-form canonical
/// rates; f < 0 flags non-Markovianity.
inline double ach_f(double tau, double gamma,
                    double delta = kSingularExclusion) {
  const auto [plus, minus] = ach_rates_analytic(tau, gamma, delta);
  (void)plus;
  return std::min(minus, 0.0);
}

}  // namespace qnm
