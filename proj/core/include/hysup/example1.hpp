#pragma once

#include "hysup/composer.hpp"
#include "hysup/observer.hpp"
#include "hysup/supervisor.hpp"

namespace hysup::ex1 {

/// Planar plant with constrained, non-simultaneous measurements of xi1 and
/// xi2. The local controller stabilizes the origin from the V0 <= 1/6 basin;
/// the global one steers to (0, alpha_bar).
struct Example1Config {
  double alpha_bar = 0.25;  // must satisfy |alpha_bar| in (0, sqrt(3)/3)
  SupervisorParams sup;

  State xi0 = {3.0, -3.0};
  int q0 = 1;
  double z0_init = 0.0;
  double z1_init = 1.0;
  double tau0 = 0.0;

  void validate() const;
};

/// xi' = (-xi1 + (u1 - xi2) xi1^2, -xi2 + xi1^2 + alpha_bar + u2).
State plant_dynamics(std::span<const double> xi, std::span<const double> u, double alpha_bar);

double V0(std::span<const double> xi);
State grad_V0(std::span<const double> xi);
double V1(std::span<const double> xi, double alpha_bar);
State grad_V1(std::span<const double> xi, double alpha_bar);
double gamma0(double s);

/// Local closed-loop vector field (u = (0, -alpha_bar)).
State f_loop0(std::span<const double> xi);
/// Global closed-loop vector field (u = (xi2, 0)).
State f_loop1(std::span<const double> xi, double alpha_bar);

struct Example1 {
  Example1Config config;
  Plant plant;
  HybridController k0, k1;
  NormObserverSpec obs0, obs1;
  SupervisedSystem sup;

  State initial_state() const;
};

Example1 build(const Example1Config& config);

/// Comparison functions of the design procedure with the literal envelopes
/// (alpha02(s) = s^2/2, alpha12(s) = s^4/4 + s^2/2) and the analytic values
/// Delta = |alpha_bar|, Delta1 = eps0a, Delta2 = alpha01^{-1}(eps0a +
/// 2 alpha02(K_radius + eps0a)) for initial conditions in a K_radius ball.
DesignInputs design_inputs(double alpha_bar, double eps0a, double eps0b, double eps1b,
                           double K_radius);

}  // namespace hysup::ex1
