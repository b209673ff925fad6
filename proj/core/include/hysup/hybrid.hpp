#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hysup/errors.hpp"

namespace hysup {

using State = std::vector<double>;

/// A point (t, j) of a hybrid time domain: t seconds of ordinary time,
/// j jumps taken so far.
struct HybridTimeStamp {
  double t = 0.0;
  int j = 0;
};

/// One interval [t_start, t_end] x {j} of a hybrid time domain. Degenerate
/// intervals (t_start == t_end) are allowed: several jumps at one instant.
struct DomainInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  int j = 0;
};

struct HybridTimeDomain {
  std::vector<DomainInterval> intervals;

  bool empty() const { return intervals.empty(); }
  double max_t() const { return intervals.empty() ? 0.0 : intervals.back().t_end; }
  int max_j() const { return intervals.empty() ? 0 : intervals.back().j; }
};

enum class Termination {
  HorizonT,     // ordinary-time horizon reached
  HorizonJ,     // jump horizon reached
  FlowSetExit,  // flow set left with the jump set disabled
  NoProgress,   // no solution from the initial point, or a jump loop at one instant
  Converged,    // convergence monitor satisfied for the configured hold time
};

std::string to_string(Termination term);

struct Sample {
  double t = 0.0;
  State x;
};

/// Samples of one flow interval; carries the jump count j of that interval.
struct ArcInterval {
  int j = 0;
  std::vector<Sample> samples;
};

/// A simulated hybrid arc. The first sample of interval j+1 shares its t with
/// the last sample of interval j (the pre-/post-jump pair).
struct HybridArc {
  std::vector<ArcInterval> intervals;
  Termination termination = Termination::HorizonT;

  bool empty() const { return intervals.empty(); }
  HybridTimeDomain domain() const;
  const Sample& first_sample() const { return intervals.front().samples.front(); }
  const Sample& last_sample() const { return intervals.back().samples.back(); }
  int jump_count() const { return intervals.empty() ? 0 : intervals.back().j; }
  std::size_t sample_count() const;
};

/// Hybrid system data (C, F, D, G) plus an output map. Sets are encoded by
/// continuous signed guards with the convention guard(x) >= 0 <=> membership,
/// so that event detection has a crossing quantity to localize.
struct HybridSystemDef {
  int dim = 0;

  /// Single-valued flow map selection: writes dx (size dim).
  std::function<void(std::span<const double> x, std::span<double> dx)> flow_map;

  /// flow_guard(x) >= 0  <=>  x in C.
  std::function<double(std::span<const double> x)> flow_guard;

  /// Set-valued jump map by explicit enumeration; must be nonempty whenever
  /// jump_guard(x) >= 0.
  std::function<std::vector<State>(std::span<const double> x)> jump_map;

  /// jump_guard(x) >= 0  <=>  x in D.
  std::function<double(std::span<const double> x)> jump_guard;

  /// Measured output y = h(x). May be null when no output is needed.
  std::function<State(std::span<const double> x)> output;
};

enum class JumpPriority { JumpFirst, FlowFirst };

struct SolverConfig {
  double dt = 1e-3;          // flow step (s)
  double guard_tol = 1e-8;   // guard zero-crossing tolerance
  double max_t = 10.0;       // ordinary-time horizon (s)
  int max_j = 500;           // jump horizon; also the per-instant jump cap
  JumpPriority jump_priority = JumpPriority::JumpFirst;
  int refine_iters = 80;     // bisection iterations for event localization

  /// Optional convergence monitor: when `converged` holds along flow for
  /// `converge_hold` seconds, the solver stops with Termination::Converged.
  std::function<bool(std::span<const double> x)> converged;
  double converge_hold = 1.0;

  void validate() const;
};

}  // namespace hysup
