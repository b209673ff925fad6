#include "hysup/example1.hpp"

#include <cmath>

namespace hysup::ex1 {

namespace {
constexpr double kAlphaBarLimit = 0.57735026918962573;  // sqrt(3)/3
}

void Example1Config::validate() const {
  const double a = std::abs(alpha_bar);
  if (!(a > 0.0) || !(a < kAlphaBarLimit))
    throw InvalidConfig("example 1: |alpha_bar| must lie in (0, sqrt(3)/3)");
  if (q0 != 0 && q0 != 1) throw InvalidConfig("example 1: q0 must be 0 or 1");
  if (z0_init < 0.0 || z1_init < 0.0 || tau0 < 0.0)
    throw InvalidConfig("example 1: observer and timer states must be nonnegative");
}

State plant_dynamics(std::span<const double> xi, std::span<const double> u, double alpha_bar) {
  return {-xi[0] + (u[0] - xi[1]) * xi[0] * xi[0],
          -xi[1] + xi[0] * xi[0] + alpha_bar + u[1]};
}

double V0(std::span<const double> xi) { return 0.5 * (xi[0] * xi[0] + xi[1] * xi[1]); }

State grad_V0(std::span<const double> xi) { return {xi[0], xi[1]}; }

double V1(std::span<const double> xi, double alpha_bar) {
  const double w = xi[1] - alpha_bar;
  return 0.25 * std::pow(xi[0], 4) + 0.5 * w * w;
}

State grad_V1(std::span<const double> xi, double alpha_bar) {
  return {std::pow(xi[0], 3), xi[1] - alpha_bar};
}

double gamma0(double s) {
  const double s2 = s * s;
  return s2 * s2 * (1.0 + s2);
}

State f_loop0(std::span<const double> xi) {
  return {-xi[0] - xi[1] * xi[0] * xi[0], -xi[1] + xi[0] * xi[0]};
}

State f_loop1(std::span<const double> xi, double alpha_bar) {
  return {-xi[0], -xi[1] + xi[0] * xi[0] + alpha_bar};
}

Example1 build(const Example1Config& config) {
  config.validate();
  const double a = config.alpha_bar;

  Example1 ex;
  ex.config = config;

  ex.plant.n_p = 2;
  ex.plant.m_p = 2;
  ex.plant.f_p = [a](std::span<const double> xi, std::span<const double> u, std::span<double> dxi) {
    dxi[0] = -xi[0] + (u[0] - xi[1]) * xi[0] * xi[0];
    dxi[1] = -xi[1] + xi[0] * xi[0] + a + u[1];
  };
  ex.plant.outputs.push_back({1, [](std::span<const double> xi) { return State{xi[0]}; }});
  ex.plant.outputs.push_back({1, [a](std::span<const double> xi) { return State{xi[1] - a}; }});

  // Local static controller: kappa_0 = (0, -alpha_bar), target A0 = {0}.
  ex.k0.n_c = 0;
  ex.k0.m_c = 1;
  ex.k0.kappa = [a](std::span<const double>, std::span<const double>) { return State{0.0, -a}; };
  ex.k0.dist_target = [](std::span<const double> xi) { return std::hypot(xi[0], xi[1]); };

  // Global static controller: kappa_1 = (y + alpha_bar, 0), target A1 = (0, alpha_bar).
  ex.k1.n_c = 0;
  ex.k1.m_c = 1;
  ex.k1.kappa = [a](std::span<const double> y, std::span<const double>) {
    return State{y[0] + a, 0.0};
  };
  ex.k1.dist_target = [a](std::span<const double> xi) { return std::hypot(xi[0], xi[1] - a); };

  // V0 = |xi|^2/2 gives exact quadratic envelopes; the estimator bound uses
  // the normalized variant max(s^2/2, s) so that alpha2(s) >= s holds.
  ex.obs0.eps = 1.0;
  ex.obs0.gamma = gamma0;
  ex.obs0.alpha1 = [](double s) { return 0.5 * s * s; };
  ex.obs0.alpha2 = [](double s) { return std::max(0.5 * s * s, s); };
  ex.obs0.alpha1_inv = [](double s) { return std::sqrt(2.0 * s); };
  ex.obs0.V = [](std::span<const double> x) { return V0(x); };
  ex.obs0.dist = [](std::span<const double> x) { return std::hypot(x[0], x[1]); };

  // The global loop admits the gain-free estimator z1' = -z1.
  ex.obs1.eps = 1.0;
  ex.obs1.gamma = [](double) { return 0.0; };
  ex.obs1.alpha1 = [](double s) {
    const double h = 0.5 * s;
    return std::min(std::pow(h, 4), h * h);
  };
  ex.obs1.alpha1_inv = [](double s) {
    return 2.0 * std::max(std::pow(s, 0.25), std::sqrt(s));
  };
  ex.obs1.alpha2 = [](double s) {
    return std::max(0.25 * std::pow(s, 4) + 0.5 * s * s, s);
  };
  ex.obs1.V = [a](std::span<const double> x) { return V1(x, a); };
  ex.obs1.dist = [a](std::span<const double> x) { return std::hypot(x[0], x[1] - a); };

  ex.sup = build_supervised_system(ex.plant, ex.k0, ex.k1, ex.obs0, ex.obs1, config.sup);
  return ex;
}

State Example1::initial_state() const {
  return sup.layout.pack(config.xi0, {}, {}, config.z0_init, config.z1_init, config.q0,
                         config.tau0);
}

DesignInputs design_inputs(double alpha_bar, double eps0a, double eps0b, double eps1b,
                           double K_radius) {
  DesignInputs in;
  in.eps0b = eps0b;
  in.eps1b = eps1b;
  in.eps0 = 1.0;
  in.eps1 = 1.0;
  in.alpha01_inv = [](double s) { return std::sqrt(2.0 * s); };
  in.alpha02 = [](double s) { return 0.5 * s * s; };
  in.alpha11_inv = [](double s) { return 2.0 * std::max(std::pow(s, 0.25), std::sqrt(s)); };
  in.alpha12 = [](double s) { return 0.25 * std::pow(s, 4) + 0.5 * s * s; };

  in.Delta = std::abs(alpha_bar);
  in.Delta1 = eps0a;
  in.Delta2 = in.alpha01_inv(eps0a + 2.0 * in.alpha02(K_radius + eps0a));
  return in;
}

}  // namespace hysup::ex1
