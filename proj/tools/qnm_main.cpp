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

// Command-line harness: witness scans over tau grids, non-Markovian
// interval detection, the damped-case g/f comparison, and the invariant
// check battery. Exit codes: 0 success/agreement, 1 disagreement or
// runtime failure, 2 usage error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qnm/qnm.hpp"

namespace {

struct CommonOpts {
  std::string criterion = "all";
  double gamma = 0.0;
  double tau_max = qnm::kPi;
  int steps = 800;
  double delta = qnm::kSingularExclusion;
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool with_criterion) {
  if (with_criterion)
    cmd->add_option("--criterion", opts->criterion,
                    "witness to evaluate: blp|rhp|ach|all")
        ->default_val("all");
  cmd->add_option("--gamma", opts->gamma, "dimensionless decay rate");
  cmd->add_option("--tau-max", opts->tau_max, "grid end (dimensionless time)");
  cmd->add_option("--steps", opts->steps, "number of grid steps");
  cmd->add_option("--delta", opts->delta,
                  "exclusion radius around tan 2tau poles");
  cmd->add_option("--seed", opts->seed, "seed for random state pairs");
  cmd->add_option("--out", opts->out, "CSV output path");
}

qnm::ScanConfig to_config(const CommonOpts& opts) {
  qnm::ScanConfig cfg;
  cfg.criterion = qnm::parse_criterion(opts.criterion);
  cfg.gamma = opts.gamma;
  cfg.tau_max = opts.tau_max;
  cfg.steps = opts.steps;
  cfg.delta = opts.delta;
  cfg.seed = opts.seed;
  cfg.out_path = opts.out;
  return cfg;
}

void print_intervals(const qnm::WitnessTrace& trace) {
  std::printf("%s:", qnm::criterion_name(trace.criterion));
  if (trace.intervals.empty()) std::printf(" (none)");
  for (const auto& iv : trace.intervals)
    std::printf(" [%.9g, %.9g]", iv.lo, iv.hi);
  std::printf("\n");
}

int run_scan_cmd(const CommonOpts& opts, bool intervals_only) {
  const qnm::ScanResult result = qnm::run_scan(to_config(opts));
  if (intervals_only) {
    for (const auto& trace : result.traces) print_intervals(trace);
  } else {
    if (opts.out.empty()) {
      std::fputs(result.csv.c_str(), stdout);
    } else {
      std::printf("wrote %zu rows to %s (%d grid points dropped in %zu "
                  "exclusion windows)\n",
                  result.grid.points.size(), opts.out.c_str(),
                  result.grid.dropped_points,
                  result.grid.excluded_windows.size());
      for (const auto& trace : result.traces) print_intervals(trace);
    }
  }
  if (result.blp_check) {
    const auto& c = *result.blp_check;
    std::fprintf(stderr,
                 "blp sign-region check: %d/%d pairs passed (%d skipped)\n",
                 c.passed, c.pairs - c.skipped, c.skipped);
    if (!c.all_passed) return 1;
  }
  return 0;
}

int run_fig1_cmd(const CommonOpts& opts) {
  const std::string out = opts.out.empty() ? "fig1.csv" : opts.out;
  const double gamma = opts.gamma;
  const qnm::Fig1Result result =
      qnm::fig1_report(gamma, opts.tau_max, opts.steps, opts.delta, out);
  const auto& rep = result.report;
  std::printf("gamma = %g, %zu grid points, wrote %s\n", gamma,
              result.scan.grid.points.size(), out.c_str());
  print_intervals(result.scan.traces[0]);
  print_intervals(result.scan.traces[1]);
  std::printf("pointwise g>0 <=> f<0: %s\n",
              rep.pointwise_agreement ? "yes" : "NO");
  std::printf("interval symmetric difference %.3g (allowed %.3g): %s\n",
              rep.symmetric_difference, rep.allowed_slack,
              rep.interval_agreement ? "agree" : "DISAGREE");
  std::printf("max boundary discrepancy between criteria: %.3g\n",
              rep.max_boundary_discrepancy);
  std::printf("boundaries vs nearest pi/4 multiple:\n");
  for (const auto& [found, exact] : rep.boundaries_vs_exact)
    std::printf("  %.9f (exact %.9f, off by %.2e)\n", found, exact,
                std::abs(found - exact));
  return rep.agreed() ? 0 : 1;
}

int run_check_cmd(std::uint64_t seed) {
  bool all = true;
  for (const qnm::CheckResult& r : qnm::run_invariant_checks(seed)) {
    std::printf("%-22s %s  (%s)\n", r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.detail.c_str());
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qubit under random external fields: witness scans, non-Markovian "
      "interval detection, and master-equation cross-checks"};
  app.require_subcommand(1);

  CommonOpts scan_opts, intervals_opts, fig1_opts;
  std::uint64_t check_seed = 1;
  fig1_opts.gamma = 3.0;

  CLI::App* scan = app.add_subcommand(
      "scan", "evaluate witnesses on a tau grid and emit CSV");
  add_common(scan, &scan_opts, true);

  CLI::App* intervals = app.add_subcommand(
      "intervals", "detect and print non-Markovian tau intervals");
  add_common(intervals, &intervals_opts, true);

  CLI::App* fig1 = app.add_subcommand(
      "fig1", "damped-case comparison of the rhp and ach witnesses "
              "(columns tau,g,f)");
  add_common(fig1, &fig1_opts, false);

  CLI::App* check =
      app.add_subcommand("check", "run the library invariant suites");
  check->add_option("--seed", check_seed, "seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(scan)) return run_scan_cmd(scan_opts, false);
    if (app.got_subcommand(intervals)) return run_scan_cmd(intervals_opts, true);
    if (app.got_subcommand(fig1)) return run_fig1_cmd(fig1_opts);
    if (app.got_subcommand(check)) return run_check_cmd(check_seed);
  } catch (const qnm::ParameterError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const qnm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
