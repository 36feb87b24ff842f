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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qnm/complex_matrix.hpp"
#include "qnm/dynamics.hpp"
#include "qnm/errors.hpp"
#include "qnm/generators.hpp"

namespace qnm {

/// How to treat a singular point tau_s = pi/4 + k pi/2 lying strictly inside
/// the integration interval: refuse, or jump across [tau_s - delta,
/// tau_s + delta] with the exact map (nondissipative model only).
enum class SingularCrossing { kForbid, kMapBridge };

struct IntegrationPlan {
  double tau_start = 0.0;
  double tau_end = 0.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  double delta = kSingularExclusion;
  int max_steps = 1000000;
  SingularCrossing crossing = SingularCrossing::kForbid;

  void validate() const {
    if (!(tau_start < tau_end))
      throw ParameterError("tau_end", "integration interval is empty");
    if (rtol <= 0.0 || atol <= 0.0)
      throw ParameterError("rtol", "tolerances must be positive");
    if (delta < 0.0) throw ParameterError("delta", "must be non-negative");
    if (max_steps < 1) throw ParameterError("max_steps", "must be positive");
    if (inside_singular_window(tau_start, delta) ||
        inside_singular_window(tau_end, delta))
      throw ParameterError("tau_start",
                           "interval endpoint lies inside a singular "
                           "exclusion window");
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr std::array<double, 6> kDpC = {1.0 / 5, 3.0 / 10, 4.0 / 5,
                                               8.0 / 9, 1.0, 1.0};
inline constexpr std::array<std::array<double, 6>, 6> kDpA = {{
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656,
     0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
}};
inline constexpr std::array<double, 7> kDpB5 = {
    35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
inline constexpr std::array<double, 7> kDpB4 = {
    5179.0 / 57600,    0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200,
    187.0 / 2100, 1.0 / 40};

using StateVec = std::vector<cplx>;

inline StateVec axpy(StateVec y, const StateVec& x, double a) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  return y;
}

/// One adaptive segment over [a, b] with no singular point inside.
inline void integrate_segment(
    const std::function<Generator(double)>& gen, StateVec& y, double a,
    double b, const IntegrationPlan& plan, int& steps_used) {
  auto deriv = [&gen](double tau, const StateVec& v) {
    return matvec(gen(tau).action, v);
  };

  double tau = a;
  double h = std::min(1e-3, b - a);
  const double done = 1e-14 * std::max(1.0, std::abs(b));
  while (b - tau > done) {
    if (steps_used++ >= plan.max_steps)
      throw BudgetError("integrate_me: max_steps exceeded at tau = " +
                        std::to_string(tau));
    if (h < 1e-15 * std::max(1.0, std::abs(tau)))
      throw SingularityError(tau, nearest_singular_tau(tau),
                             "integrate_me: step size underflow");
    h = std::min(h, b - tau);

    std::array<StateVec, 7> k;
    k[0] = deriv(tau, y);
    for (std::size_t s = 1; s < 7; ++s) {
      StateVec stage = y;
      for (std::size_t j = 0; j < s; ++j)
        if (kDpA[s - 1][j] != 0.0) stage = axpy(std::move(stage), k[j], h * kDpA[s - 1][j]);
      k[s] = (s < 6) ? deriv(tau + kDpC[s - 1] * h, stage)
                     : deriv(tau + h, stage);
    }

    StateVec y5 = y, y4 = y;
    for (std::size_t s = 0; s < 7; ++s) {
      if (kDpB5[s] != 0.0) y5 = axpy(std::move(y5), k[s], h * kDpB5[s]);
      if (kDpB4[s] != 0.0) y4 = axpy(std::move(y4), k[s], h * kDpB4[s]);
    }

    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double scale =
          plan.atol +
          plan.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double e = std::abs(y5[i] - y4[i]) / scale;
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(y.size()));

    if (err <= 1.0) {
      tau += h;
      y = std::move(y5);
    }
    const double factor =
        (err == 0.0) ? 5.0
                     : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }
}

/// Exact-map jump across a singular window: the Bloch x and z components
/// scale by cos 2tau_b / cos 2tau_a, y and the trace are untouched.
inline StateVec map_bridge(const StateVec& y, double tau_a, double tau_b) {
  const ComplexMatrix rho = devectorize(y);
  const auto [x, yy, z] = bloch_of(rho);
  const double ratio = std::cos(2.0 * tau_b) / std::cos(2.0 * tau_a);
  ComplexMatrix out = matrix_from_bloch(x * ratio, yy, z * ratio);
  // preserve the (unit) trace part exactly as carried by the state
  out += (rho.trace() - cplx{1.0, 0.0}) * (identity2() * 0.5);
  return vectorize(out);
}

}  // namespace detail

/// Integrate d rho / d tau = L(tau) rho with an embedded Dormand-Prince 4/5
/// pair on the vectorized state. Singular points are never crossed by
/// stepping; with SingularCrossing::kMapBridge the exact map jumps over
/// [tau_s - delta, tau_s + delta] (nondissipative generators only).
inline QubitState integrate_me(const std::function<Generator(double)>& gen,
                               const QubitState& rho0,
                               const IntegrationPlan& plan) {
  plan.validate();

  // Partition [tau_start, tau_end] at singular windows.
  std::vector<double> poles;
  for (double ts = nearest_singular_tau(plan.tau_start) - kPi;
       ts < plan.tau_end + kPi; ts += kPi / 2.0)
    if (ts > plan.tau_start && ts < plan.tau_end) poles.push_back(ts);
  if (!poles.empty() && plan.crossing == SingularCrossing::kForbid)
    throw ParameterError("crossing",
                         "interval contains a singular point tau_s = " +
                             std::to_string(poles.front()) +
                             "; use the map-bridge crossing policy");

  detail::StateVec y = vectorize(rho0.matrix());
  int steps_used = 0;
  double cursor = plan.tau_start;
  const double margin = 1e-12;
  for (double ts : poles) {
    const double stop = ts - plan.delta - margin;
    const double resume = ts + plan.delta + margin;
    if (gen(stop).gamma != 0.0)
      throw DomainError(
          "integrate_me: map-bridge crossing is exact only for the "
          "nondissipative model (gamma = 0)");
    detail::integrate_segment(gen, y, cursor, stop, plan, steps_used);
    y = detail::map_bridge(y, stop, resume);
    cursor = resume;
  }
  detail::integrate_segment(gen, y, cursor, plan.tau_end, plan, steps_used);

  ComplexMatrix rho = devectorize(y);
  const double herm_defect = rho.hermiticity_defect();
  if (herm_defect > 1e-9)
    throw InvariantViolation("integrate_me: Hermiticity drift " +
                             std::to_string(herm_defect));
  const double trace_drift = std::abs(rho.trace() - cplx{1.0, 0.0});
  if (trace_drift > 1e-9)
    throw InvariantViolation("integrate_me: trace drift " +
                             std::to_string(trace_drift));
  rho = (rho + rho.adjoint()) * 0.5;
  if (trace_drift > 1e-12) rho = rho * (1.0 / rho.trace().real());
  // positivity is monitored, not enforced: anything below -1e-8 throws
  return QubitState(std::move(rho), 1e-8);
}

struct ConsistencyReport {
  double max_deviation = 0.0;
  std::vector<std::pair<double, double>> per_target;  // (tau, deviation)
};

/// Cross-validate map and master equation: integrate the nondissipative
/// generator from 0 to each target and compare with the exact map on four
/// basis initial states, reporting the worst elementwise deviation.
inline ConsistencyReport consistency_map_vs_me(
    const std::vector<double>& targets, double rtol = 1e-9,
    double atol = 1e-12) {
  const std::array<QubitState, 4> basis = {
      QubitState::excited(), QubitState::ground(),
      QubitState::from_bloch(1.0, 0.0, 0.0), QubitState::from_bloch(0.0, 1.0, 0.0)};

  ConsistencyReport report;
  for (double target : targets) {
    if (!(target > 0.0) || target >= kPi / 4.0 - kSingularExclusion)
      throw ParameterError("targets",
                           "each target must lie in (0, pi/4 - delta)");
    IntegrationPlan plan;
    plan.tau_start = 0.0;
    plan.tau_end = target;
    plan.rtol = rtol;
    plan.atol = atol;
    double worst = 0.0;
    for (const QubitState& rho0 : basis) {
      const QubitState integrated = integrate_me(
          [](double tau) { return generator_nondissipative(tau); }, rho0,
          plan);
      const QubitState mapped = apply_map(target, rho0);
      worst = std::max(worst,
                       integrated.matrix().max_abs_diff(mapped.matrix()));
    }
    report.per_target.emplace_back(target, worst);
    report.max_deviation = std::max(report.max_deviation, worst);
  }
  return report;
}

}  // namespace qnm
