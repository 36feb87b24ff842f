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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qnm/dynamics.hpp"
#include "qnm/evolve.hpp"
#include "qnm/generators.hpp"
#include "qnm/scan.hpp"
#include "qnm/witnesses.hpp"

namespace qnm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline double random_tau_away_from_poles(std::mt19937_64& rng, double lo,
                                         double hi, double margin) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (;;) {
    const double tau = dist(rng);
    if (!inside_singular_window(tau, margin)) return tau;
  }
}

inline QubitState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    const double x = unit(rng), y = unit(rng), z = unit(rng);
    if (x * x + y * y + z * z <= 1.0) return QubitState::from_bloch(x, y, z);
  }
}

}  // namespace detail

/// Channel physics of the exact map: complete positivity (Choi PSD), trace
/// and Hermiticity preservation, unitality, pi-periodicity, Bloch action.
inline CheckResult check_map_physics(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r{"map-physics", true, ""};
  double worst_choi = 0.0, worst_other = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double tau = kPi * k / 200.0;
    const EigenSystem es = hermitian_eigen(choi_of_map(tau));
    worst_choi = std::min(worst_choi, es.values.back());

    const QubitState rho = detail::random_state(rng);
    const ComplexMatrix evolved = apply_map_matrix(tau, rho.matrix());
    worst_other = std::max(worst_other,
                           std::abs(evolved.trace() - cplx{1.0, 0.0}));
    worst_other = std::max(worst_other, evolved.hermiticity_defect());
    worst_other = std::max(
        worst_other,
        apply_map_matrix(tau, identity2() * 0.5)
            .max_abs_diff(identity2() * 0.5));
    worst_other = std::max(
        worst_other,
        apply_map_matrix(tau + kPi, rho.matrix()).max_abs_diff(evolved));

    const auto [x, y, z] = rho.bloch();
    const auto [xe, ye, ze] = bloch_of(evolved);
    const double c = std::cos(2.0 * tau);
    worst_other = std::max({worst_other, std::abs(xe - c * x),
                            std::abs(ye - y), std::abs(ze - c * z)});
  }
  r.passed = worst_choi >= -1e-12 && worst_other <= 1e-12;
  r.detail = "min Choi eigenvalue " + std::to_string(worst_choi) +
             ", worst CPTP/unital/periodicity deviation " +
             std::to_string(worst_other);
  return r;
}

/// Map -> master-equation reconstruction equals the closed-form generator.
inline CheckResult check_reconstruction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r{"reconstruction", true, ""};
  const auto& map = EnsembleMap::random_external_fields();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    const double lo = (pick(rng) < 0.5) ? kSingularExclusion
                                        : kPi / 4.0 + kSingularExclusion;
    const double hi = (lo < kPi / 4.0) ? kPi / 4.0 - kSingularExclusion
                                       : kPi / 2.0 - kSingularExclusion;
    std::uniform_real_distribution<double> dist(lo, hi);
    const double tau = dist(rng);
    const auto [mats, gen] = reconstruct_generator_from_map(map, tau);
    worst = std::max(worst, gen.action.max_abs_diff(
                                generator_nondissipative(tau).action));
  }
  r.passed = worst <= 1e-8;
  r.detail = "max |reconstructed - closed form| = " + std::to_string(worst);
  return r;
}

/// Canonical decomposition against the closed-form rates and identities.
inline CheckResult check_canonical_identities() {
  CheckResult r{"canonical-identities", true, ""};
  double worst = 0.0;
  for (double gamma : {1.0, 3.0}) {
    for (int k = 1; k <= 100; ++k) {
      const double tau = kPi * k / 101.0;
      if (inside_singular_window(tau)) continue;
      const auto [plus, minus] = ach_rates_analytic(tau, gamma);
      const double t = std::tan(2.0 * tau);
      worst = std::max(worst, std::abs(plus + minus - (gamma + 2.0 * t)));
      worst = std::max(worst, std::abs(plus * minus - gamma * t));

      const CanonicalForm form =
          canonical_decompose(generator_dissipative(tau, gamma));
      double best_plus = 1e9, best_minus = 1e9;
      double sum_rates = 0.0;
      for (const auto& ch : form.channels) {
        best_plus = std::min(best_plus, std::abs(ch.rate - plus));
        best_minus = std::min(best_minus, std::abs(ch.rate - minus));
        sum_rates += ch.rate;
        for (const auto& other : form.channels)
          worst = std::max(
              worst, std::abs(std::abs((ch.op.adjoint() * other.op).trace()) -
                              (&ch == &other ? 1.0 : 0.0)));
      }
      worst = std::max({worst, best_plus, best_minus});
      worst = std::max(worst, std::abs(sum_rates - (gamma + 2.0 * t)));
      worst = std::max(
          worst, form.reassembled_action().max_abs_diff(
                     generator_dissipative(tau, gamma).action));
    }
  }
  r.passed = worst <= 1e-9;
  r.detail = "worst rate/identity/orthonormality/reassembly deviation = " +
             std::to_string(worst);
  return r;
}

/// Numeric RHP limit against the closed form.
inline CheckResult check_rhp_oracle() {
  CheckResult r{"rhp-oracle", true, ""};
  double worst = 0.0;
  for (double gamma : {0.0, 1.0, 3.0}) {
    for (int k = 1; k <= 100; ++k) {
      const double tau = kPi * k / 101.0;
      if (inside_singular_window(tau)) continue;
      const Generator gen = (gamma == 0.0)
                                ? generator_nondissipative(tau)
                                : generator_dissipative(tau, gamma);
      worst = std::max(worst, std::abs(rhp_g_numeric(gen) -
                                       rhp_g_analytic(tau, gamma)));
    }
  }
  r.passed = worst <= 1e-5;
  r.detail = "max |numeric - analytic| = " + std::to_string(worst);
  return r;
}

/// Integrating the master equation reproduces the exact map.
inline CheckResult check_map_vs_me() {
  CheckResult r{"map-vs-me", true, ""};
  const ConsistencyReport rep =
      consistency_map_vs_me({0.1, 0.25, kPi / 8.0, 0.7});
  r.passed = rep.max_deviation <= 1e-6;
  r.detail = "max deviation = " + std::to_string(rep.max_deviation);
  return r;
}

/// The three witnesses flag the same tau regions.
inline CheckResult check_criterion_agreement(std::uint64_t seed) {
  CheckResult r{"criterion-agreement", true, ""};
  std::mt19937_64 rng(seed);
  std::vector<StatePair> pairs{StatePair::canonical()};
  for (int k = 0; k < 5; ++k) pairs.push_back(StatePair::random(rng));

  bool ok = true;
  for (int k = 1; k <= 160; ++k) {
    const double tau = kPi * k / 160.0;
    if (inside_singular_window(tau, 2e-3)) continue;
    const double quarter = std::abs(
        tau / (kPi / 4.0) - std::round(tau / (kPi / 4.0))) * (kPi / 4.0);
    if (quarter < 2e-3) continue;
    const bool expected = std::tan(2.0 * tau) < 0.0;
    ok = ok && ((rhp_g_analytic(tau, 0.0) > kWitnessZeroClamp) == expected);
    ok = ok && ((ach_f(tau, 0.0) < -kWitnessZeroClamp) == expected);
    ok = ok && ((blp_sigma(pairs.front(), tau) > kWitnessZeroClamp) == expected);
    for (double gamma : {1.0, 3.0, 10.0}) {
      const bool g_pos = rhp_g_analytic(tau, gamma) > kWitnessZeroClamp;
      const bool f_neg = ach_f(tau, gamma) < -kWitnessZeroClamp;
      ok = ok && (g_pos == expected) && (f_neg == expected);
    }
  }
  const SignRegionReport sign_report = [&] {
    std::vector<double> grid;
    for (int k = 1; k <= 160; ++k) grid.push_back(kPi * k / 160.0);
    return blp_sign_region_check(pairs, grid);
  }();
  ok = ok && sign_report.all_passed();
  r.passed = ok;
  r.detail = ok ? "all witnesses agree on the flagged regions"
                : "witness disagreement detected";
  return r;
}

inline std::vector<CheckResult> run_invariant_checks(std::uint64_t seed = 1) {
  return {check_map_physics(seed),
          check_reconstruction(seed + 1),
          check_canonical_identities(),
          check_rhp_oracle(),
          check_map_vs_me(),
          check_criterion_agreement(seed + 2)};
}

}  // namespace qnm
