#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hysup/hybrid.hpp"

namespace hysup {

/// Simulates the hybrid system from x0. Flow advances by fixed-step RK4 with
/// bisection refinement of guard crossings; jumps apply the first enumerated
/// element of the jump map. Identical inputs produce bit-identical arcs.
HybridArc solve(const HybridSystemDef& system, const State& x0, const SolverConfig& cfg);

enum class FlowHit { JumpGuard, FlowExit, Budget };

struct FlowResult {
  State x;
  double elapsed = 0.0;
  FlowHit hit = FlowHit::Budget;
};

/// Integrates the flow map from x until the jump guard crosses zero upward
/// (JumpGuard), the flow guard crosses zero downward (FlowExit), or t_budget
/// is exhausted (Budget). Crossings are localized to within cfg.guard_tol.
FlowResult advance_flow(const HybridSystemDef& system, std::span<const double> x,
                        double t_budget, const SolverConfig& cfg);

/// Applies the jump map at x and returns the successor with index `selector`
/// (default: first enumerated element).
State apply_jump(const HybridSystemDef& system, std::span<const double> x,
                 std::size_t selector = 0);

struct Violation {
  enum class Kind { FlowSet, FlowDerivative, JumpSet, JumpMap, DomainOrder };
  Kind kind;
  HybridTimeStamp where;
  double magnitude = 0.0;
  std::string detail;
};

/// Re-checks an arc against the system data: flow-set membership on interval
/// interiors, finite-difference consistency of the flow, and jump-set plus
/// jump-map membership at every jump. Violations are data, not errors.
std::vector<Violation> check_solution(const HybridArc& arc, const HybridSystemDef& system,
                                      double tol, double deriv_rel_tol = 0.05);

/// Single explicit fourth-order Runge-Kutta step of size h.
/// Throws NumericalBlowup if any stage produces a non-finite value.
void rk4_step(const HybridSystemDef& system, std::span<const double> x, double h,
              std::span<double> out);

/// Spot check of guard regularity near their zero sets: samples the box
/// [-halfwidth, halfwidth]^dim, and at points where a guard is close to zero
/// probes coordinate neighbors at distance h. Returns the largest observed
/// |guard(x') - guard(x)| / h; a finite, moderate value is consistent with
/// the continuity the event detector relies on. Full well-posedness of
/// user-supplied systems is assumed, not verified.
double guard_regularity(const HybridSystemDef& system, double box_halfwidth, int samples,
                        std::uint64_t seed, double h = 1e-5);

}  // namespace hysup
