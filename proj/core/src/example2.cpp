#include "hysup/example2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hysup::ex2 {

void Example2Config::validate() const {
  if (!(mu > 1.0)) throw InvalidConfig("example 2: mu must exceed 1");
  if (!(lambda > 0.0) || !(lambda < mu - 1.0))
    throw InvalidConfig("example 2: lambda must lie in (0, mu - 1)");
  if (!(alpha_hat > 0.0)) throw InvalidConfig("example 2: alpha_hat must be positive");
  if (!(route_offset > 0.0) || !(barrier_width > 0.0) || !(sigma > 0.0))
    throw InvalidConfig("example 2: route shaping parameters must be positive");
  if (zeta1_0 != 1 && zeta1_0 != 2) throw InvalidConfig("example 2: zeta1_0 must be 1 or 2");
  if (q0 != 0 && q0 != 1) throw InvalidConfig("example 2: q0 must be 0 or 1");
}

double barrier(double z) {
  if (z <= 0.0) throw DomainError("barrier: argument must be positive");
  if (z >= 1.0) return 0.0;
  const double w = z - 1.0;
  return w * w * std::log(1.0 / z);
}

double barrier_deriv(double z) {
  if (z <= 0.0) throw DomainError("barrier: argument must be positive");
  if (z >= 1.0) return 0.0;
  const double w = z - 1.0;
  return 2.0 * w * std::log(1.0 / z) - w * w / z;
}

namespace {

State route_center(int route, const Example2Config& cfg) {
  const double off = route == 1 ? cfg.route_offset : -cfg.route_offset;
  return {cfg.xi_bar[0], cfg.xi_bar[1] + off};
}

struct Clearance {
  double d;        // scaled clearance
  State grad;      // d(d)/d(xi)
};

Clearance clearance_with_grad(std::span<const double> xi, int route, const Example2Config& cfg) {
  const State c = route_center(route, cfg);
  const double dx = xi[0] - c[0];
  const double dy = xi[1] - c[1];
  const double rho = cfg.alpha_hat + cfg.route_offset;
  const double r = std::sqrt(dx * dx + dy * dy + cfg.sigma * cfg.sigma);
  const double d = (r - rho) / cfg.barrier_width;
  const double scale = 1.0 / (cfg.barrier_width * r);
  return {d, {dx * scale, dy * scale}};
}

}  // namespace

double clearance(std::span<const double> xi, int route, const Example2Config& cfg) {
  return clearance_with_grad(xi, route, cfg).d;
}

double potential(std::span<const double> xi, int route, const Example2Config& cfg) {
  const double d = clearance(xi, route, cfg);
  if (d <= 0.0) throw DomainError("potential: state inside the route keep-out set");
  const double ex = xi[0] - cfg.xi_circ[0];
  const double ey = xi[1] - cfg.xi_circ[1];
  return 0.5 * (ex * ex + ey * ey) + barrier(d);
}

State potential_grad(std::span<const double> xi, int route, const Example2Config& cfg) {
  const auto cl = clearance_with_grad(xi, route, cfg);
  if (cl.d <= 0.0) throw DomainError("potential: state inside the route keep-out set");
  const double bp = barrier_deriv(cl.d);
  return {xi[0] - cfg.xi_circ[0] + bp * cl.grad[0], xi[1] - cfg.xi_circ[1] + bp * cl.grad[1]};
}

double potential_safe(std::span<const double> xi, int route, const Example2Config& cfg) {
  const double d = clearance(xi, route, cfg);
  const double ex = xi[0] - cfg.xi_circ[0];
  const double ey = xi[1] - cfg.xi_circ[1];
  return 0.5 * (ex * ex + ey * ey) + barrier(std::max(d, cfg.clamp_d));
}

State potential_grad_safe(std::span<const double> xi, int route, const Example2Config& cfg) {
  const auto cl = clearance_with_grad(xi, route, cfg);
  const double ex = xi[0] - cfg.xi_circ[0];
  const double ey = xi[1] - cfg.xi_circ[1];
  if (cl.d <= cfg.clamp_d) return {ex, ey};  // barrier held constant inside the clamp
  const double bp = barrier_deriv(cl.d);
  return {ex + bp * cl.grad[0], ey + bp * cl.grad[1]};
}

std::vector<int> hysteresis_jump(std::span<const double> xi, int zeta1,
                                 const Example2Config& cfg) {
  const double phi1 = potential_safe(xi, 1, cfg);
  const double phi2 = potential_safe(xi, 2, cfg);
  const double active = zeta1 == 1 ? phi1 : phi2;
  const double threshold = cfg.mu - cfg.lambda;

  std::vector<int> successors;
  for (int cand : {1, 2}) {
    const double phi_cand = cand == 1 ? phi1 : phi2;
    if (active >= threshold * phi_cand) successors.push_back(cand);
  }
  std::stable_sort(successors.begin(), successors.end(), [&](int a, int b) {
    const double pa = a == 1 ? phi1 : phi2;
    const double pb = b == 1 ? phi1 : phi2;
    if (pa != pb) return pa < pb;
    return a == zeta1 && b != zeta1;  // current mode first on ties
  });
  return successors;
}

bool in_region_O1(std::span<const double> xi) { return std::abs(xi[0]) - 1.1 >= xi[1]; }
bool in_region_O2(std::span<const double> xi) { return std::abs(xi[0]) + 1.1 <= xi[1]; }

Example2 build(const Example2Config& config) {
  config.validate();
  Example2 ex;
  ex.config = config;
  const Example2Config cfg = config;

  ex.plant.n_p = 2;
  ex.plant.m_p = 2;
  ex.plant.f_p = [](std::span<const double>, std::span<const double> u, std::span<double> dxi) {
    dxi[0] = u[0];
    dxi[1] = u[1];
  };
  // Output 0: full state, measurable near the local target.
  ex.plant.outputs.push_back({2, [](std::span<const double> xi) {
                                return State{xi[0], xi[1]};
                              }});
  // Output 1: both potentials and their gradients.
  ex.plant.outputs.push_back({6, [cfg](std::span<const double> xi) {
                                const double p1 = potential_safe(xi, 1, cfg);
                                const double p2 = potential_safe(xi, 2, cfg);
                                const State g1 = potential_grad_safe(xi, 1, cfg);
                                const State g2 = potential_grad_safe(xi, 2, cfg);
                                return State{p1, g1[0], g1[1], p2, g2[0], g2[1]};
                              }});

  // Local controller: kappa_0(y) = -y + xi_star, target A0 = {xi_star}.
  HybridController k0_static;
  k0_static.n_c = 0;
  k0_static.m_c = 2;
  const State xi_star = cfg.xi_star;
  k0_static.kappa = [xi_star](std::span<const double> y, std::span<const double>) {
    return State{xi_star[0] - y[0], xi_star[1] - y[1]};
  };
  k0_static.dist_target = [xi_star](std::span<const double> xi) {
    return std::hypot(xi[0] - xi_star[0], xi[1] - xi_star[1]);
  };
  ex.k0 = pad_controller(k0_static, 1);

  // Hysteresis gradient controller with discrete route state zeta1.
  ex.k1.n_c = 1;
  ex.k1.m_c = 6;
  ex.k1.kappa = [](std::span<const double> y, std::span<const double> zeta) {
    return zeta[0] < 1.5 ? State{-y[1], -y[2]} : State{-y[4], -y[5]};
  };
  ex.k1.f_c = [](std::span<const double>, std::span<const double>, std::span<double> dz) {
    dz[0] = 0.0;
  };
  const double mu = cfg.mu;
  const double mu_l = cfg.mu - cfg.lambda;
  ex.k1.flow_guard = [mu](std::span<const double> y, std::span<const double> zeta) {
    const double active = zeta[0] < 1.5 ? y[0] : y[3];
    return mu * std::min(y[0], y[3]) - active;
  };
  ex.k1.jump_guard = [mu_l](std::span<const double> y, std::span<const double> zeta) {
    const double active = zeta[0] < 1.5 ? y[0] : y[3];
    return active - mu_l * std::min(y[0], y[3]);
  };
  ex.k1.g_c = [mu_l](std::span<const double> y, std::span<const double> zeta) {
    const double phi1 = y[0];
    const double phi2 = y[3];
    const double active = zeta[0] < 1.5 ? phi1 : phi2;
    const int current = zeta[0] < 1.5 ? 1 : 2;
    std::vector<State> successors;
    std::vector<int> order;
    for (int cand : {1, 2}) {
      if (active >= mu_l * (cand == 1 ? phi1 : phi2)) order.push_back(cand);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double pa = a == 1 ? phi1 : phi2;
      const double pb = b == 1 ? phi1 : phi2;
      if (pa != pb) return pa < pb;
      return a == current && b != current;
    });
    for (int z : order) successors.push_back({static_cast<double>(z)});
    return successors;
  };
  ex.k1.phi_rep = {1.0};
  ex.k1.phi_guard = [](std::span<const double> zeta) {
    return 0.5 - std::min(std::abs(zeta[0] - 1.0), std::abs(zeta[0] - 2.0));
  };
  const State xi_circ = cfg.xi_circ;
  ex.k1.dist_target = [xi_circ](std::span<const double> xi) {
    return std::hypot(xi[0] - xi_circ[0], xi[1] - xi_circ[1]);
  };

  // Gain-free local estimator; basin envelopes are exact quadratics.
  ex.obs0.eps = 1.0;
  ex.obs0.gamma = [](double) { return 0.0; };
  ex.obs0.alpha1 = [](double s) { return 0.5 * s * s; };
  ex.obs0.alpha2 = [](double s) { return std::max(0.5 * s * s, s); };
  ex.obs0.alpha1_inv = [](double s) { return std::sqrt(2.0 * s); };
  ex.obs0.V = [xi_star](std::span<const double> x) {
    return 0.5 * (std::pow(x[0] - xi_star[0], 2) + std::pow(x[1] - xi_star[1], 2));
  };
  ex.obs0.dist = [xi_star](std::span<const double> x) {
    return std::hypot(x[0] - xi_star[0], x[1] - xi_star[1]);
  };

  // Estimator for the hysteresis loop: eps1 = 1 - (mu - lambda)^{-1}.
  ex.obs1.eps = 1.0 - 1.0 / mu_l;
  ex.obs1.gamma = [](double s) { return s * s; };
  ex.obs1.alpha1 = [](double s) { return 0.25 * s * s; };
  ex.obs1.alpha2 = [](double s) { return std::max(4.0 * s * s, s); };
  ex.obs1.V = [cfg](std::span<const double> x) {
    const State xi{x[0], x[1]};
    const int route = x.size() > 2 && x[2] > 1.5 ? 2 : 1;
    return potential_safe(xi, route, cfg);
  };
  ex.obs1.dist = [xi_circ](std::span<const double> x) {
    return std::hypot(x[0] - xi_circ[0], x[1] - xi_circ[1]);
  };

  ex.sup = build_supervised_system(ex.plant, ex.k0, ex.k1, ex.obs0, ex.obs1, cfg.sup);
  return ex;
}

State Example2::initial_state() const {
  const State zeta0 = {0.0};
  const State zeta1 = {static_cast<double>(config.zeta1_0)};
  return sup.layout.pack(config.xi0, zeta0, zeta1, config.z0_init, config.z1_init, config.q0,
                         config.tau0);
}

double flow_decrease_violation(const HybridArc& arc, const SupervisedLayout& layout,
                               const Example2Config& cfg) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& iv : arc.intervals) {
    for (const auto& s : iv.samples) {
      if (s.x[layout.q()] < 0.5) continue;
      const State xi{s.x[layout.xi()], s.x[layout.xi() + 1]};
      const int route = s.x[layout.zeta1()] > 1.5 ? 2 : 1;
      const double phi = potential_safe(xi, route, cfg);
      const State g = potential_grad_safe(xi, route, cfg);
      // d/dt phi = <grad phi, -grad phi>.
      const double phidot = -(g[0] * g[0] + g[1] * g[1]);
      worst = std::max(worst, phidot + 2.0 * phi);
    }
  }
  return worst;
}

std::vector<JumpDecrease> jump_decrease_report(const HybridArc& arc,
                                               const SupervisedLayout& layout,
                                               const Example2Config& cfg) {
  std::vector<JumpDecrease> out;
  for (std::size_t k = 0; k + 1 < arc.intervals.size(); ++k) {
    const auto& pre = arc.intervals[k].samples.back();
    const auto& post = arc.intervals[k + 1].samples.front();
    const bool q1 = pre.x[layout.q()] > 0.5 && post.x[layout.q()] > 0.5;
    const int z_pre = pre.x[layout.zeta1()] > 1.5 ? 2 : 1;
    const int z_post = post.x[layout.zeta1()] > 1.5 ? 2 : 1;
    if (!q1 || z_pre == z_post) continue;
    const State xi{pre.x[layout.xi()], pre.x[layout.xi() + 1]};
    out.push_back({pre.t, z_pre, z_post, potential_safe(xi, z_pre, cfg),
                   potential_safe(xi, z_post, cfg)});
  }
  return out;
}

}  // namespace hysup::ex2
