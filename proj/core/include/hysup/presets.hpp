#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hysup/example1.hpp"
#include "hysup/example2.hpp"
#include "hysup/perturb.hpp"

namespace hysup {

/// A fully specified simulation scenario: configuration, initial state, and
/// solver settings. Preset names: ex1-figA, ex1-figB, ex1-figC, ex2-below,
/// ex2-above.
struct Scenario {
  std::string name;
  std::variant<ex1::Example1Config, ex2::Example2Config> config;
  SolverConfig solver;
  double conv_tol = 1e-3;  // convergence monitor threshold (0 disables)

  bool is_ex1() const { return std::holds_alternative<ex1::Example1Config>(config); }
};

/// A scenario with its built closed loop, ready to run.
struct BuiltScenario {
  Scenario scenario;
  SupervisedSystem sup;
  State x0;
  SolverConfig solver;  // monitor attached when conv_tol > 0
};

std::vector<std::string> preset_names();
Scenario make_preset(const std::string& name);

/// Builds the closed loop; with a non-zero disturbance profile the plant is
/// wrapped first (the supervised state then carries a trailing clock).
BuiltScenario build_scenario(const Scenario& scenario,
                             const DisturbanceProfile* profile = nullptr);

/// Noise on every channel of an example-1 scenario, bounded by delta.
DisturbanceProfile ex1_noise_profile(double delta, std::uint64_t seed);

}  // namespace hysup
