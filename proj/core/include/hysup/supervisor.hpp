#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hysup/composer.hpp"
#include "hysup/hybrid.hpp"
#include "hysup/observer.hpp"
#include "hysup/solver.hpp"

namespace hysup {

/// Runtime parameters of the switching supervisor.
struct SupervisorParams {
  double eps0a = 0.01;     // local-observer threshold triggering 0 -> 1
  double eps1a = 0.01;     // global-observer threshold enabling 1 -> 0
  double tau_star = 1.0;   // dwell time (s) before a 1 -> 0 handoff
  State phi0_reset;        // representative used when resetting zeta0
  State phi1_reset;        // representative used when resetting zeta1
  double eq_tol = 1e-8;    // band half-width for the z = 0 / tau = 0 constraints

  void validate() const;
};

/// The supervised closed-loop state chi = (xi, zeta0, zeta1, z0, z1, q, tau).
struct SupervisedState {
  State xi, zeta0, zeta1;
  double z0 = 0.0, z1 = 0.0;
  int q = 0;
  double tau = 0.0;
};

/// Index layout of the flat supervised state vector.
struct SupervisedLayout {
  int n_p = 0;
  int n_c = 0;

  int xi() const { return 0; }
  int zeta0() const { return n_p; }
  int zeta1() const { return n_p + n_c; }
  int z0() const { return n_p + 2 * n_c; }
  int z1() const { return n_p + 2 * n_c + 1; }
  int q() const { return n_p + 2 * n_c + 2; }
  int tau() const { return n_p + 2 * n_c + 3; }
  int dim() const { return n_p + 2 * n_c + 4; }

  std::span<const double> xi_of(std::span<const double> x) const { return x.subspan(xi(), n_p); }
  std::span<const double> zeta0_of(std::span<const double> x) const { return x.subspan(zeta0(), n_c); }
  std::span<const double> zeta1_of(std::span<const double> x) const { return x.subspan(zeta1(), n_c); }

  State pack(std::span<const double> xi0, std::span<const double> zeta0,
             std::span<const double> zeta1, double z0v, double z1v, int qv, double tauv) const;
  State pack(const SupervisedState& s) const;
  SupervisedState unpack(std::span<const double> x) const;
  std::vector<std::string> column_names() const;
};

/// The supervised closed loop together with its state layout and the pieces
/// needed by reports and monitors.
struct SupervisedSystem {
  HybridSystemDef def;
  SupervisedLayout layout;
  std::function<double(std::span<const double> xi)> dist_A0;
  std::function<double(std::span<const double> xi)> dist_A1;
};

/// Builds the full supervised closed loop: the q-gated flow map, the jump
/// maps of the active controller and of the supervisor, and the composite
/// flow/jump sets. Controllers must be padded to a common n_c beforehand.
SupervisedSystem build_supervised_system(const Plant& plant, const HybridController& k0,
                                         const HybridController& k1, const NormObserverSpec& obs0,
                                         const NormObserverSpec& obs1,
                                         const SupervisorParams& params);

/// Convergence monitor predicate: |xi|_A0 <= conv_tol while q == 0.
std::function<bool(std::span<const double>)> make_convergence_monitor(
    const SupervisedSystem& sys, double conv_tol);

// ---------------------------------------------------------------------------
// Parameter design procedure
// ---------------------------------------------------------------------------

/// Comparison-function data entering the dwell-time condition.
struct DesignInputs {
  double eps0b = 0.0;  // basin sublevel of V0
  double eps1b = 0.0;  // handoff sublevel of V1
  double Delta = 0.0;   // max distance between the two target sets
  double Delta1 = 0.0;  // max local-observer value over solutions from K
  double Delta2 = 0.0;  // max state distance over solutions from K
  double eps0 = 1.0;
  double eps1 = 1.0;
  std::function<double(double)> alpha01_inv;
  std::function<double(double)> alpha02;
  std::function<double(double)> alpha11_inv;
  std::function<double(double)> alpha12;

  void validate() const;
};

struct Step3Result {
  bool pass = false;
  double lhs = 0.0;
};

/// Evaluates alpha12(alpha11^{-1}(eps1a + bbar1(Delta + alpha01^{-1}(Delta1 +
/// bbar0(Delta2, tau*)), tau*))) <= eps1b with bbar_i(s,t) = 2 exp(-eps_i t)
/// alpha_{i,2}(s), and returns the computed left-hand side for diagnostics.
Step3Result design_step3_check(const DesignInputs& inputs, double eps1a, double tau_star);

/// First grid point passing design_step3_check, if any. The grid must be
/// increasing.
std::optional<double> find_dwell_time(const DesignInputs& inputs, double eps1a,
                                      std::span<const double> tau_grid);

struct Step2Config {
  int sample_budget = 200;
  double sim_horizon = 20.0;
  double box_limit = 1e6;   // abort bracket expansion past this half-width
  std::uint64_t seed = 0;
  SolverConfig solver;
};

struct Step2Report {
  bool pass = false;
  double worst_margin = 0.0;  // min over checks of (threshold - value)
  State worst_state;
  HybridTimeStamp worst_at;
};

/// Samples initial conditions on the V1 sublevel set {V1 <= eps1b}, simulates
/// the local closed loop from each, and verifies gamma0(|y0|) < eps0a * eps0
/// along every solution plus {V1 <= eps1b} contained in {V0 <= eps0b}.
Step2Report design_step2_check(const HybridSystemDef& local_loop,
                               std::function<double(std::span<const double>)> V0,
                               std::function<double(std::span<const double>)> V1,
                               std::function<double(double)> gamma0, double eps0a, double eps0b,
                               double eps1b, double eps0, const Step2Config& cfg);

// ---------------------------------------------------------------------------
// Arc inspection
// ---------------------------------------------------------------------------

struct SwitchEvent {
  double t = 0.0;
  int j = 0;  // jump index taken (pre-jump interval index)
  int from = 0;
  int to = 0;
};

struct SwitchingCensus {
  int count_0to1 = 0;
  int count_1to0 = 0;
  double min_dwell_t = std::numeric_limits<double>::infinity();
  std::vector<SwitchEvent> events;
};

/// Counts supervisor jumps by inspecting q transitions across jumps;
/// min_dwell_t is the smallest ordinary-time gap between consecutive
/// 1 -> 0 handoffs.
SwitchingCensus switching_census(const HybridArc& arc, const SupervisedLayout& layout);

struct PhaseViolation {
  int q = 0;
  double start_t = 0.0;
  double max_violation = 0.0;
};

/// Splits a supervised arc into maximal constant-q phases and checks the
/// estimator bound V_q <= z_q + beta_q(...) on each phase, treating the phase
/// entry point as the initial condition. obs_i must carry V and dist over
/// (xi, zeta_i).
std::vector<PhaseViolation> check_phase_observer_bounds(const HybridArc& arc,
                                                        const SupervisedLayout& layout,
                                                        const NormObserverSpec& obs0,
                                                        const NormObserverSpec& obs1);

}  // namespace hysup
