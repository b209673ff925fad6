#pragma once

#include <cstdint>
#include <functional>

#include "hysup/composer.hpp"
#include "hysup/hybrid.hpp"

namespace hysup {

/// One disturbance signal of ordinary time. Noise is seeded and held
/// piecewise-constant on a sample grid; values are stateless functions of the
/// grid cell, so parallel runs reproduce bit-identically.
struct DisturbanceChannel {
  enum class Kind { Zero, Constant, Sinusoid, Noise };
  Kind kind = Kind::Zero;
  int dim = 1;
  double bound = 0.0;      // uniform bound delta_i >= |d(t)|
  double amplitude = 0.0;  // signal magnitude; 0 means "use the bound"
  double frequency = 0.0;  // sinusoid cycles per second
  double phase = 0.0;
  double grid_dt = 0.01;   // noise hold interval (s)
  std::uint64_t seed = 0;
  State constant;          // Kind::Constant value (clamped to the bound)

  State eval(double t) const;  // always clamped to [-bound, bound]
  bool is_zero() const { return kind == Kind::Zero || bound == 0.0; }
};

/// d1: actuator error, d2: unmodeled dynamics, d3/d4: measurement noise on
/// the two outputs.
struct DisturbanceProfile {
  DisturbanceChannel d1, d2, d3, d4;
  bool all_zero() const { return d1.is_zero() && d2.is_zero() && d3.is_zero() && d4.is_zero(); }
};

/// Wraps a plant with the disturbance structure xi' = f_p(xi, u + d1) + d2,
/// y_i = h_i(xi) + d_{3,4}. Time dependence is realized by appending ordinary
/// time as an auxiliary state with unit flow rate; the zero profile returns
/// the plant unchanged.
Plant perturb_plant(const Plant& plant, const DisturbanceProfile& profile);

struct InflateConfig {
  int samples = 10000;        // Lipschitz-estimate sample count
  double box_halfwidth = 10.0;
  double fd_h = 1e-4;
  std::uint64_t seed = 1234;
  /// Optional additive offset applied to every jump successor (adversarial
  /// jump-map inflation); defaults to zero.
  std::function<State(std::span<const double> x)> jump_offset;
};

/// Relaxes the flow/jump guards by delta times a sampled Lipschitz estimate,
/// approximating the delta-ball inflation of the flow and jump sets.
/// delta = 0 returns a behaviorally identical system.
HybridSystemDef inflate_system(const HybridSystemDef& system, double delta,
                               const InflateConfig& cfg = {});

}  // namespace hysup
