#pragma once

#include "hysup/composer.hpp"
#include "hysup/observer.hpp"
#include "hysup/supervisor.hpp"

namespace hysup::ex2 {

/// Point-mass navigation around an obstacle: a hysteresis gradient controller
/// steers to the intermediate point xi_circ along a route selected by
/// zeta1 in {1, 2} (below/above), then a local linear controller stabilizes
/// xi_star.
struct Example2Config {
  State xi_star = {4.0, -0.25};  // local target A0
  State xi_circ = {3.0, 0.0};    // intermediate target A1
  State xi_bar = {1.0, 0.0};     // obstacle center
  double alpha_hat = 0.07;       // obstacle radius
  double mu = 1.1;               // hysteresis flow factor (> 1)
  double lambda = 0.09;          // hysteresis width (in (0, mu - 1))
  double eps_local = 1.0;        // local basin radius

  // Route-shaping clearance fields: each route measures clearance to a ball
  // of radius alpha_hat + route_offset centered route_offset above (route 1)
  // or below (route 2) the obstacle, scaled by barrier_width.
  double route_offset = 0.3;
  double barrier_width = 0.65;
  double sigma = 1e-3;      // clearance smoothing
  double clamp_d = 0.05;    // barrier clamp for guard/output evaluation

  SupervisorParams sup;

  State xi0 = {0.0, 0.0};
  int q0 = 1;
  int zeta1_0 = 1;
  double z0_init = 0.0;
  double z1_init = 1.0;
  double tau0 = 0.0;

  void validate() const;
};

/// B(z) = max{0, (z-1)^2 ln(1/z)}; throws DomainError for z <= 0.
double barrier(double z);
double barrier_deriv(double z);

/// Smoothed clearance of route i (1 or 2); positive outside the route's
/// keep-out ball, >= 1 where the barrier is inactive.
double clearance(std::span<const double> xi, int route, const Example2Config& cfg);

/// phi_i(xi) = |xi - xi_circ|^2 / 2 + B(d_i(xi)); throws DomainError when
/// d_i(xi) <= 0. The gradient is analytic.
double potential(std::span<const double> xi, int route, const Example2Config& cfg);
State potential_grad(std::span<const double> xi, int route, const Example2Config& cfg);

/// Total variants used by guards and measured outputs: the barrier argument
/// is clamped at cfg.clamp_d, so the value stays finite inside the keep-out
/// ball (where the route is infeasible anyway).
double potential_safe(std::span<const double> xi, int route, const Example2Config& cfg);
State potential_grad_safe(std::span<const double> xi, int route, const Example2Config& cfg);

/// Successors {zeta' in {1,2} : phi_zeta(xi) >= (mu - lambda) phi_zeta'(xi)},
/// ordered with the argmin of phi first (current zeta first on ties).
std::vector<int> hysteresis_jump(std::span<const double> xi, int zeta1,
                                 const Example2Config& cfg);

/// Printed wedge-region predicates, exposed for field audits only.
bool in_region_O1(std::span<const double> xi);
bool in_region_O2(std::span<const double> xi);

struct Example2 {
  Example2Config config;
  Plant plant;
  HybridController k0, k1;  // k0 padded to n_c = 1
  NormObserverSpec obs0, obs1;
  SupervisedSystem sup;

  State initial_state() const;
};

Example2 build(const Example2Config& config);

/// Max over q = 1 flow samples of d/dt phi + 2 phi (positive values violate
/// the flow-decrease property of the active potential).
double flow_decrease_violation(const HybridArc& arc, const SupervisedLayout& layout,
                               const Example2Config& cfg);

struct JumpDecrease {
  double t = 0.0;
  int zeta_from = 0;
  int zeta_to = 0;
  double phi_pre = 0.0;
  double phi_post = 0.0;
};

/// Hysteresis jumps of an arc with the pre-/post-jump potential values;
/// each must satisfy phi_post <= phi_pre / (mu - lambda).
std::vector<JumpDecrease> jump_decrease_report(const HybridArc& arc,
                                               const SupervisedLayout& layout,
                                               const Example2Config& cfg);

}  // namespace hysup::ex2
