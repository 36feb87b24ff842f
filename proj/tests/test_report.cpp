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
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qnm/scan.hpp"

using namespace qnm;

TEST_CASE("make_scan_grid: drops points inside exclusion windows") {
  const GridSpec grid = make_scan_grid(kPi, 800, 1e-3);
  // tau_200 = pi/4 and tau_600 = 3pi/4 land exactly on the poles
  CHECK(grid.points.size() == 798);
  CHECK(grid.dropped_points == 2);
  REQUIRE(grid.excluded_windows.size() == 2);
  CHECK(grid.excluded_windows[0].lo == doctest::Approx(kPi / 4.0 - 1e-3));
  CHECK(grid.excluded_windows[1].hi == doctest::Approx(3.0 * kPi / 4.0 + 1e-3));
  for (double tau : grid.points) CHECK(!inside_singular_window(tau, 1e-3));
}

TEST_CASE("detect_intervals: undamped rhp trace on (0, pi/2)") {
  ScanConfig cfg;
  cfg.criterion = Criterion::kRhp;
  cfg.tau_max = kPi / 2.0;
  cfg.steps = 400;
  const ScanResult result = run_scan(cfg);
  REQUIRE(result.traces.size() == 1);
  const auto& intervals = result.traces[0].intervals;
  REQUIRE(intervals.size() == 1);
  CHECK(std::abs(intervals[0].lo - kPi / 4.0) <= 1e-6);
  CHECK(std::abs(intervals[0].hi - kPi / 2.0) <= 1e-6);

  // zeros on (0, pi/4): the map is divisible there
  for (std::size_t i = 0; i < result.grid.points.size(); ++i)
    if (result.grid.points[i] < kPi / 4.0 - 1e-3)
      CHECK(result.traces[0].values[i] == 0.0);
}

TEST_CASE("detect_intervals: constant-zero trace has no intervals") {
  WitnessTrace trace;
  trace.criterion = Criterion::kRhp;
  trace.grid = {0.1, 0.2, 0.3};
  trace.values = {0.0, 0.0, 0.0};
  CHECK(detect_intervals(trace).empty());

  WitnessTrace empty;
  empty.criterion = Criterion::kRhp;
  CHECK_THROWS_AS(detect_intervals(empty), EmptyInputError);
}

TEST_CASE("detect_intervals: damped ach trace on (0, pi)") {
  ScanConfig cfg;
  cfg.criterion = Criterion::kAch;
  cfg.gamma = 3.0;
  cfg.steps = 800;
  const ScanResult result = run_scan(cfg);
  const auto& intervals = result.traces[0].intervals;
  REQUIRE(intervals.size() == 2);
  CHECK(std::abs(intervals[0].lo - kPi / 4.0) <= 1e-6);
  CHECK(std::abs(intervals[0].hi - kPi / 2.0) <= 1e-6);
  CHECK(std::abs(intervals[1].lo - 3.0 * kPi / 4.0) <= 1e-6);
  CHECK(std::abs(intervals[1].hi - kPi) <= 1e-6);
}

TEST_CASE("detect_intervals: boundaries near pi/4 + k pi/2 for every gamma") {
  const std::vector<Interval> expected = {{kPi / 4.0, kPi / 2.0},
                                          {3.0 * kPi / 4.0, kPi}};
  for (double gamma : {0.0, 1.0, 3.0, 10.0}) {
    ScanConfig cfg;
    cfg.criterion = Criterion::kAll;
    cfg.gamma = gamma;
    cfg.steps = 800;
    const ScanResult result = run_scan(cfg);
    for (const auto& trace : result.traces) {
      REQUIRE(trace.intervals.size() == 2);
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(trace.intervals[k].lo - expected[k].lo) <= 1e-4);
        CHECK(std::abs(trace.intervals[k].hi - expected[k].hi) <= 1e-4);
      }
    }
  }
}

TEST_CASE("run_scan: config validation") {
  ScanConfig cfg;
  cfg.steps = 1;
  CHECK_THROWS_AS(run_scan(cfg), ParameterError);

  ScanConfig blp_damped;
  blp_damped.criterion = Criterion::kBlp;
  blp_damped.gamma = 3.0;
  blp_damped.steps = 16;
  CHECK_THROWS_AS(run_scan(blp_damped), ParameterError);

  ScanConfig negative;
  negative.gamma = -1.0;
  CHECK_THROWS_AS(run_scan(negative), ParameterError);

  ScanConfig bad_out;
  bad_out.steps = 8;
  bad_out.tau_max = 0.5;
  bad_out.out_path = "/nonexistent_dir_qnm/x.csv";
  CHECK_THROWS_AS(run_scan(bad_out), ParameterError);
}

TEST_CASE("run_scan: column layout follows criterion and gamma") {
  ScanConfig cfg;
  cfg.steps = 64;
  cfg.tau_max = 1.0;

  cfg.criterion = Criterion::kAll;
  cfg.gamma = 0.0;
  CHECK(run_scan(cfg).csv.find("tau,sigma,g,f\n") != std::string::npos);

  cfg.gamma = 3.0;
  const ScanResult damped = run_scan(cfg);
  CHECK(damped.csv.find("tau,g,f\n") != std::string::npos);
  CHECK(damped.traces.size() == 2);

  cfg.criterion = Criterion::kBlp;
  cfg.gamma = 0.0;
  const ScanResult blp = run_scan(cfg);
  CHECK(blp.csv.find("tau,sigma\n") != std::string::npos);
  REQUIRE(blp.blp_check.has_value());
  CHECK(blp.blp_check->all_passed);
}

TEST_CASE("run_scan: deterministic full-precision CSV") {
  ScanConfig cfg;
  cfg.criterion = Criterion::kRhp;
  cfg.steps = 100;
  cfg.seed = 7;
  const ScanResult a = run_scan(cfg);
  const ScanResult b = run_scan(cfg);
  CHECK(a.csv == b.csv);

  CHECK(a.csv.rfind("# excluded_windows=", 0) == 0);
  CHECK(a.csv.find('\r') == std::string::npos);
  // first grid point pi/100 printed with 17 significant digits
  CHECK(a.csv.find("\n0.031415926535897934,") != std::string::npos);
}

TEST_CASE("run_scan: csv written to disk matches the returned text") {
  ScanConfig cfg;
  cfg.criterion = Criterion::kAch;
  cfg.gamma = 1.0;
  cfg.steps = 40;
  cfg.tau_max = 2.0;
  cfg.out_path = "scan_test_out.csv";
  const ScanResult result = run_scan(cfg);
  std::ifstream in(cfg.out_path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == result.csv);
  std::remove(cfg.out_path.c_str());
}

TEST_CASE("fig1_report: damped comparison agrees") {
  const Fig1Result result = fig1_report(3.0, kPi, 800);
  CHECK(result.report.pointwise_agreement);
  CHECK(result.report.interval_agreement);
  CHECK(result.report.agreed());
  CHECK(result.report.max_boundary_discrepancy <= 1e-6);
  REQUIRE(result.report.rhp_intervals.size() == 2);
  REQUIRE(result.report.ach_intervals.size() == 2);

  // row at 3pi/8 carries g = -f = (sqrt(13)-1)/2
  const auto& grid = result.scan.grid.points;
  const auto& g = result.scan.traces[0].values;
  const auto& f = result.scan.traces[1].values;
  bool found = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - 3.0 * kPi / 8.0) < 1e-12) {
      found = true;
      CHECK(std::abs(g[i] - 1.3027756377319946) <= 1e-6);
      CHECK(std::abs(f[i] + 1.3027756377319946) <= 1e-6);
    }
  }
  CHECK(found);

  // boundaries land on multiples of pi/4
  for (const auto& [found_b, exact_b] : result.report.boundaries_vs_exact)
    CHECK(std::abs(found_b - exact_b) <= 1e-4);

  CHECK_THROWS_AS(fig1_report(0.0, kPi, 100), ParameterError);
}
