#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hysup/hybrid.hpp"

namespace hysup::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // the measured quantity (violation, time, distance...)
  std::string detail;
};

struct SuiteOptions {
  std::string preset;  // restricts preset-driven suites when nonempty
  std::uint64_t seed = 0;
};

std::vector<std::string> suite_names();

/// Runs one property suite and returns one row per check. Suites:
///   solver-order     integrator order and event localization
///   ex1-certificates sampled flow inequalities and the basin inclusion
///   design           parameter design procedure regression
///   ex1-figA/B/C     switching structure of the three scenarios
///   observer-bounds  phase-wise estimator bounds along ex1 presets
///   ex2-avoidance    obstacle clearance and route structure
///   ex2-decrease     hysteresis jump decrease and flow decrease
///   robustness       bounded-noise sweep on ex1-figA
std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opts = {});

/// Runs every suite in order.
std::vector<CheckResult> run_all(const SuiteOptions& opts = {});

}  // namespace hysup::verify
