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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qnm/dynamics.hpp"
#include "qnm/errors.hpp"
#include "qnm/generators.hpp"
#include "qnm/witnesses.hpp"

namespace qnm {

enum class Criterion { kBlp, kRhp, kAch, kAll };

inline const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::kBlp: return "blp";
    case Criterion::kRhp: return "rhp";
    case Criterion::kAch: return "ach";
    case Criterion::kAll: return "all";
  }
  return "?";
}

inline Criterion parse_criterion(const std::string& s) {
  if (s == "blp") return Criterion::kBlp;
  if (s == "rhp") return Criterion::kRhp;
  if (s == "ach") return Criterion::kAch;
  if (s == "all") return Criterion::kAll;
  throw ParameterError("criterion", "expected blp|rhp|ach|all, got '" + s + "'");
}

struct ScanConfig {
  Criterion criterion = Criterion::kAll;
  double gamma = 0.0;
  double tau_max = kPi;
  int steps = 800;
  double delta = kSingularExclusion;
  std::uint64_t seed = 1;
  std::string out_path;   // empty: caller decides what to do with the CSV text
  int random_pairs = 20;  // extra pairs for the BLP sign-region check

  void validate() const {
    if (steps < 2) throw ParameterError("steps", "need at least 2 grid steps");
    if (!(tau_max > 0.0)) throw ParameterError("tau-max", "must be positive");
    if (gamma < 0.0) throw ParameterError("gamma", "must be non-negative");
    if (!(delta > 0.0)) throw ParameterError("delta", "must be positive");
    if (random_pairs < 0) throw ParameterError("random-pairs", "must be >= 0");
    if ((criterion == Criterion::kBlp) && gamma > 0.0)
      throw ParameterError("gamma",
                           "the blp witness is only defined for gamma = 0 "
                           "(no exact map is available with damping)");
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct GridSpec {
  std::vector<double> points;              // tau_j = j tau_max / steps, minus drops
  std::vector<Interval> excluded_windows;  // singular windows inside (0, tau_max]
  int dropped_points = 0;
};

/// Uniform grid over (0, tau_max]; points inside a singular exclusion window
/// are dropped and counted.
inline GridSpec make_scan_grid(double tau_max, int steps, double delta) {
  GridSpec grid;
  for (double ts = kPi / 4.0; ts <= tau_max + delta; ts += kPi / 2.0)
    if (ts + delta > 0.0 && ts - delta < tau_max)
      grid.excluded_windows.push_back({ts - delta, ts + delta});
  for (int j = 1; j <= steps; ++j) {
    const double tau = tau_max * static_cast<double>(j) /
                       static_cast<double>(steps);
    if (inside_singular_window(tau, delta)) {
      ++grid.dropped_points;
      continue;
    }
    grid.points.push_back(tau);
  }
  return grid;
}

/// Sampled witness values over a tau grid plus the detected non-Markovian
/// intervals.
struct WitnessTrace {
  Criterion criterion = Criterion::kRhp;  // never kAll
  double gamma = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<Interval> intervals;
};

/// Re-evaluation hooks for interval boundary refinement. `evaluable` is
/// false inside singular exclusion windows for the generator-based
/// witnesses; the BLP witness is regular everywhere.
struct WitnessEvaluator {
  Criterion criterion = Criterion::kRhp;
  double gamma = 0.0;
  double delta = kSingularExclusion;
  std::function<double(double)> value;
  std::function<bool(double)> evaluable;

  bool flagged(double v) const {
    if (criterion == Criterion::kAch) return v < -kWitnessZeroClamp;
    return v > kWitnessZeroClamp;
  }

  static WitnessEvaluator make(Criterion c, double gamma,
                               double delta = kSingularExclusion) {
    WitnessEvaluator ev;
    ev.criterion = c;
    ev.gamma = gamma;
    ev.delta = delta;
    switch (c) {
      case Criterion::kRhp:
        ev.value = [gamma, delta](double tau) {
          return rhp_g_numeric(gamma == 0.0
                                   ? generator_nondissipative(tau, delta)
                                   : generator_dissipative(tau, gamma, delta));
        };
        ev.evaluable = [delta](double tau) {
          return !inside_singular_window(tau, delta);
        };
        break;
      case Criterion::kAch:
        ev.value = [gamma, delta](double tau) {
          return ach_f(tau, gamma, delta);
        };
        ev.evaluable = [delta](double tau) {
          return !inside_singular_window(tau, delta);
        };
        break;
      case Criterion::kBlp:
      case Criterion::kAll:
        throw ParameterError("criterion",
                             "use make_blp for the blp evaluator");
    }
    return ev;
  }

  static WitnessEvaluator make_blp(const StatePair& pair,
                                   double delta = kSingularExclusion) {
    WitnessEvaluator ev;
    ev.criterion = Criterion::kBlp;
    ev.gamma = 0.0;
    ev.delta = delta;
    ev.value = [pair](double tau) { return blp_sigma(pair, tau); };
    ev.evaluable = [](double tau) { return tau >= 1e-6; };
    return ev;
  }
};

namespace detail {

/// Refine a predicate flip inside (a, b) to 1e-6, where flag(a) == fa and
/// flag(b) == !fa. A flip bracketed by a singular exclusion window snaps to
/// the pole tau_s inside it (the witness jumps there and cannot be
/// evaluated closer).
inline double refine_boundary(const WitnessEvaluator& ev, double a, double b,
                              bool fa) {
  const double ts = nearest_singular_tau(0.5 * (a + b));
  if (ev.delta > 0.0 && ts > a && ts < b) {
    const double lo = std::max(a, ts - ev.delta);
    const double hi = std::min(b, ts + ev.delta);
    const bool flag_lo = (lo > a && ev.evaluable(lo))
                             ? ev.flagged(ev.value(lo))
                             : fa;
    const bool flag_hi = (hi < b && ev.evaluable(hi))
                             ? ev.flagged(ev.value(hi))
                             : !fa;
    if (flag_lo != fa) {
      b = lo;  // flip happens before the window
    } else if (flag_lo != flag_hi) {
      if (!ev.evaluable(ts)) return ts;  // flip hidden by the pole window
      // evaluable across the window (blp): fall through to plain bisection
    } else {
      a = hi;  // flip happens after the window
      fa = flag_hi;
    }
  }
  for (int iter = 0; iter < 200 && b - a > 1e-6; ++iter) {
    const double mid = 0.5 * (a + b);
    if (!ev.evaluable(mid)) return nearest_singular_tau(mid);
    if (ev.flagged(ev.value(mid)) == fa)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Turn contiguous flagged runs of the trace into intervals, refining every
/// interior boundary on the witness itself.
inline std::vector<Interval> detect_intervals(const WitnessTrace& trace,
                                              const WitnessEvaluator& ev) {
  if (trace.grid.empty())
    throw EmptyInputError(
        "detect_intervals: no grid points outside exclusion windows");
  if (trace.grid.size() != trace.values.size())
    throw DimensionError("detect_intervals: grid/values size mismatch");
  for (std::size_t i = 1; i < trace.grid.size(); ++i)
    if (!(trace.grid[i] > trace.grid[i - 1]))
      throw InvariantViolation("detect_intervals: grid is not ascending");

  const std::size_t n = trace.grid.size();
  std::vector<Interval> out;
  std::size_t i = 0;
  while (i < n) {
    if (!ev.flagged(trace.values[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && ev.flagged(trace.values[j + 1])) ++j;
    Interval iv;
    iv.lo = (i == 0) ? trace.grid[0]
                     : detail::refine_boundary(ev, trace.grid[i - 1],
                                               trace.grid[i], false);
    iv.hi = (j + 1 == n) ? trace.grid[n - 1]
                         : detail::refine_boundary(ev, trace.grid[j],
                                                   trace.grid[j + 1], true);
    out.push_back(iv);
    i = j + 1;
  }
  return out;
}

/// Convenience overload: rebuilds the default evaluator from the trace tags
/// (canonical pair for blp).
inline std::vector<Interval> detect_intervals(const WitnessTrace& trace) {
  const WitnessEvaluator ev =
      (trace.criterion == Criterion::kBlp)
          ? WitnessEvaluator::make_blp(StatePair::canonical())
          : WitnessEvaluator::make(trace.criterion, trace.gamma);
  return detect_intervals(trace, ev);
}

struct BlpRegionSummary {
  int pairs = 0;
  int passed = 0;
  int skipped = 0;
  bool all_passed = false;
};

struct ScanResult {
  GridSpec grid;
  std::vector<WitnessTrace> traces;
  std::string csv;
  std::optional<BlpRegionSummary> blp_check;
};

inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV text: one sidecar comment line recording the excluded windows, a
/// header row, then full-precision rows, LF line endings.
inline std::string render_csv(const GridSpec& grid,
                              const std::vector<WitnessTrace>& traces) {
  std::string text = "# excluded_windows=";
  for (std::size_t w = 0; w < grid.excluded_windows.size(); ++w) {
    if (w) text += ";";
    text += "[" + format_full(grid.excluded_windows[w].lo) + "," +
            format_full(grid.excluded_windows[w].hi) + "]";
  }
  text += "\n";

  text += "tau";
  for (const WitnessTrace& tr : traces) {
    switch (tr.criterion) {
      case Criterion::kBlp: text += ",sigma"; break;
      case Criterion::kRhp: text += ",g"; break;
      case Criterion::kAch: text += ",f"; break;
      case Criterion::kAll: break;
    }
  }
  text += "\n";

  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    text += format_full(grid.points[i]);
    for (const WitnessTrace& tr : traces) text += "," + format_full(tr.values[i]);
    text += "\n";
  }
  return text;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("out", "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ParameterError("out", "write to '" + path + "' failed");
}

/// Evaluate the requested witnesses over the grid, detect non-Markovian
/// intervals, render the CSV, and (if configured) write it. With damping,
/// `all` resolves to the rhp and ach witnesses; blp requires gamma = 0.
inline ScanResult run_scan(const ScanConfig& cfg) {
  cfg.validate();
  ScanResult result;
  result.grid = make_scan_grid(cfg.tau_max, cfg.steps, cfg.delta);
  if (result.grid.points.empty())
    throw EmptyInputError("run_scan: every grid point fell inside an "
                          "exclusion window");

  std::vector<Criterion> wanted;
  switch (cfg.criterion) {
    case Criterion::kBlp: wanted = {Criterion::kBlp}; break;
    case Criterion::kRhp: wanted = {Criterion::kRhp}; break;
    case Criterion::kAch: wanted = {Criterion::kAch}; break;
    case Criterion::kAll:
      if (cfg.gamma == 0.0)
        wanted = {Criterion::kBlp, Criterion::kRhp, Criterion::kAch};
      else
        wanted = {Criterion::kRhp, Criterion::kAch};
      break;
  }

  for (Criterion c : wanted) {
    const WitnessEvaluator ev =
        (c == Criterion::kBlp)
            ? WitnessEvaluator::make_blp(StatePair::canonical(), cfg.delta)
            : WitnessEvaluator::make(c, cfg.gamma, cfg.delta);
    WitnessTrace trace;
    trace.criterion = c;
    trace.gamma = cfg.gamma;
    trace.grid = result.grid.points;
    trace.values.reserve(trace.grid.size());
    for (double tau : trace.grid) trace.values.push_back(ev.value(tau));
    trace.intervals = detect_intervals(trace, ev);
    result.traces.push_back(std::move(trace));
  }

  if (std::find(wanted.begin(), wanted.end(), Criterion::kBlp) !=
      wanted.end()) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<StatePair> pairs;
    pairs.push_back(StatePair::canonical());
    for (int k = 0; k < cfg.random_pairs; ++k)
      pairs.push_back(StatePair::random(rng));
    const SignRegionReport check =
        blp_sign_region_check(pairs, result.grid.points);
    BlpRegionSummary summary;
    summary.pairs = static_cast<int>(pairs.size());
    summary.skipped = check.skipped_count();
    for (const auto& e : check.entries)
      summary.passed += (!e.skipped && e.passed) ? 1 : 0;
    summary.all_passed = check.all_passed();
    result.blp_check = summary;
  }

  result.csv = render_csv(result.grid, result.traces);
  if (!cfg.out_path.empty()) write_text_file(cfg.out_path, result.csv);
  return result;
}

/// Pairwise interval comparison between the rhp and ach witnesses.
struct ComparisonReport {
  std::vector<Interval> rhp_intervals;
  std::vector<Interval> ach_intervals;
  bool pointwise_agreement = false;   // g > 0 <=> f < 0 at every grid point
  bool interval_agreement = false;    // symmetric difference within slack
  double symmetric_difference = 0.0;
  double allowed_slack = 0.0;
  double max_boundary_discrepancy = 0.0;
  // every detected boundary with the nearest multiple of pi/4
  std::vector<std::pair<double, double>> boundaries_vs_exact;

  bool agreed() const { return pointwise_agreement && interval_agreement; }
};

namespace detail {

inline double symmetric_difference_measure(const std::vector<Interval>& a,
                                           const std::vector<Interval>& b) {
  // sweep over all endpoints; membership differs -> add segment length
  std::vector<double> cuts;
  for (const auto& iv : a) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  for (const auto& iv : b) {
    cuts.push_back(iv.lo);
    cuts.push_back(iv.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  auto inside = [](const std::vector<Interval>& set, double x) {
    for (const auto& iv : set)
      if (x >= iv.lo && x <= iv.hi) return true;
    return false;
  };
  double measure = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (inside(a, mid) != inside(b, mid)) measure += cuts[i + 1] - cuts[i];
  }
  return measure;
}

}  // namespace detail

struct Fig1Result {
  ScanResult scan;
  ComparisonReport report;
};

/// Reproduce the damped-case comparison: columns tau, g, f over the grid,
/// pointwise verification that g > 0 exactly where f < 0, and an interval
/// comparison with boundary positions against the exact pi/4 + k pi/2 and
/// k pi/2 values.
inline Fig1Result fig1_report(double gamma, double tau_max, int steps,
                              double delta = kSingularExclusion,
                              const std::string& out_path = "") {
  if (!(gamma > 0.0))
    throw ParameterError("gamma",
                         "the damped comparison requires gamma > 0");
  ScanConfig cfg;
  cfg.criterion = Criterion::kAll;
  cfg.gamma = gamma;
  cfg.tau_max = tau_max;
  cfg.steps = steps;
  cfg.delta = delta;
  cfg.out_path = out_path;

  Fig1Result result;
  result.scan = run_scan(cfg);
  const WitnessTrace& rhp = result.scan.traces[0];
  const WitnessTrace& ach = result.scan.traces[1];

  ComparisonReport& rep = result.report;
  rep.rhp_intervals = rhp.intervals;
  rep.ach_intervals = ach.intervals;

  rep.pointwise_agreement = true;
  for (std::size_t i = 0; i < rhp.grid.size(); ++i) {
    const bool g_pos = rhp.values[i] > kWitnessZeroClamp;
    const bool f_neg = ach.values[i] < -kWitnessZeroClamp;
    if (g_pos != f_neg) {
      rep.pointwise_agreement = false;
      break;
    }
  }

  const double spacing = tau_max / steps;
  const int periods = std::max(1, static_cast<int>(std::ceil(tau_max / (kPi / 2.0))));
  rep.allowed_slack = (2.0 * spacing + 2.0 * delta) * periods;
  rep.symmetric_difference = detail::symmetric_difference_measure(
      rep.rhp_intervals, rep.ach_intervals);
  rep.interval_agreement = rep.symmetric_difference <= rep.allowed_slack;

  auto record_boundaries = [&rep](const std::vector<Interval>& set) {
    for (const auto& iv : set)
      for (double b : {iv.lo, iv.hi}) {
        const double exact = std::round(b / (kPi / 4.0)) * (kPi / 4.0);
        rep.boundaries_vs_exact.emplace_back(b, exact);
      }
  };
  record_boundaries(rep.rhp_intervals);
  record_boundaries(rep.ach_intervals);

  rep.max_boundary_discrepancy = 0.0;
  if (rep.rhp_intervals.size() == rep.ach_intervals.size()) {
    for (std::size_t k = 0; k < rep.rhp_intervals.size(); ++k) {
      rep.max_boundary_discrepancy = std::max(
          {rep.max_boundary_discrepancy,
           std::abs(rep.rhp_intervals[k].lo - rep.ach_intervals[k].lo),
           std::abs(rep.rhp_intervals[k].hi - rep.ach_intervals[k].hi)});
    }
  } else {
    rep.max_boundary_discrepancy =
        std::numeric_limits<double>::infinity();
    rep.interval_agreement = false;
  }
  return result;
}

}  // namespace qnm
