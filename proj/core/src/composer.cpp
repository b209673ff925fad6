#include "hysup/composer.hpp"

#include <cmath>

namespace hysup {

State evaluate_controller(const HybridController& ctrl, std::span<const double> y,
                          std::span<const double> zeta) {
  if (static_cast<int>(y.size()) != ctrl.m_c)
    throw DimensionMismatch("evaluate_controller: output dimension mismatch");
  if (static_cast<int>(zeta.size()) != ctrl.n_c)
    throw DimensionMismatch("evaluate_controller: controller state dimension mismatch");
  return ctrl.kappa(y, zeta);
}

HybridSystemDef compose_closed_loop(const Plant& plant, const HybridController& ctrl,
                                    int output_index) {
  if (output_index < 0 || output_index >= static_cast<int>(plant.outputs.size()))
    throw DimensionMismatch("compose_closed_loop: output index out of range");
  const auto& out = plant.outputs[output_index];
  if (out.dim != ctrl.m_c)
    throw DimensionMismatch("compose_closed_loop: controller input does not match output dimension");

  const int n_p = plant.n_p;
  const int n_c = ctrl.n_c;
  const bool is_static = n_c == 0;

  HybridSystemDef sys;
  sys.dim = n_p + n_c;

  sys.flow_map = [plant, ctrl, out, n_p, n_c](std::span<const double> x, std::span<double> dx) {
    auto xi = x.subspan(0, n_p);
    auto zeta = x.subspan(n_p, n_c);
    const State y = out.h(xi);
    const State u = ctrl.kappa(y, zeta);
    plant.f_p(xi, u, dx.subspan(0, n_p));
    if (n_c > 0) ctrl.f_c(y, zeta, dx.subspan(n_p, n_c));
  };

  if (is_static || !ctrl.flow_guard) {
    sys.flow_guard = [](std::span<const double>) { return 1.0; };
  } else {
    sys.flow_guard = [ctrl, out, n_p, n_c](std::span<const double> x) {
      const State y = out.h(x.subspan(0, n_p));
      return ctrl.flow_guard(y, x.subspan(n_p, n_c));
    };
  }

  if (is_static || !ctrl.jump_guard) {
    sys.jump_guard = [](std::span<const double>) { return -1.0; };
  } else {
    sys.jump_guard = [ctrl, out, n_p, n_c](std::span<const double> x) {
      const State y = out.h(x.subspan(0, n_p));
      return ctrl.jump_guard(y, x.subspan(n_p, n_c));
    };
  }

  sys.jump_map = [ctrl, out, n_p, n_c](std::span<const double> x) {
    std::vector<State> successors;
    if (n_c == 0 || !ctrl.g_c) return successors;
    auto xi = x.subspan(0, n_p);
    const State y = out.h(xi);
    for (const auto& zp : ctrl.g_c(y, x.subspan(n_p, n_c))) {
      State s(xi.begin(), xi.end());
      s.insert(s.end(), zp.begin(), zp.end());
      successors.push_back(std::move(s));
    }
    return successors;
  };

  sys.output = [out, n_p](std::span<const double> x) { return out.h(x.subspan(0, n_p)); };
  return sys;
}

HybridController pad_controller(const HybridController& ctrl, int n_c_target) {
  if (n_c_target < ctrl.n_c)
    throw DimensionMismatch("pad_controller: target dimension smaller than controller state");
  if (n_c_target == ctrl.n_c) return ctrl;

  const int n0 = ctrl.n_c;
  HybridController padded = ctrl;
  padded.n_c = n_c_target;

  padded.kappa = [ctrl, n0](std::span<const double> y, std::span<const double> zeta) {
    return ctrl.kappa(y, zeta.subspan(0, n0));
  };
  padded.f_c = [ctrl, n0](std::span<const double> y, std::span<const double> zeta,
                          std::span<double> dzeta) {
    if (n0 > 0) ctrl.f_c(y, zeta.subspan(0, n0), dzeta.subspan(0, n0));
    for (std::size_t i = n0; i < dzeta.size(); ++i) dzeta[i] = 0.0;
  };
  if (ctrl.flow_guard) {
    padded.flow_guard = [ctrl, n0](std::span<const double> y, std::span<const double> zeta) {
      return ctrl.flow_guard(y, zeta.subspan(0, n0));
    };
  }
  if (ctrl.jump_guard) {
    padded.jump_guard = [ctrl, n0](std::span<const double> y, std::span<const double> zeta) {
      return ctrl.jump_guard(y, zeta.subspan(0, n0));
    };
  }
  if (ctrl.g_c) {
    padded.g_c = [ctrl, n0, n_c_target](std::span<const double> y, std::span<const double> zeta) {
      auto successors = ctrl.g_c(y, zeta.subspan(0, n0));
      for (auto& s : successors) s.resize(n_c_target, 0.0);
      return successors;
    };
  }
  padded.phi_rep = ctrl.phi_rep;
  padded.phi_rep.resize(n_c_target, 0.0);
  padded.phi_guard = [ctrl, n0](std::span<const double> zeta) {
    double pad = 0.0;
    for (std::size_t i = n0; i < zeta.size(); ++i) pad = std::max(pad, std::abs(zeta[i]));
    const double pad_term = 0.5 - pad;
    if (n0 == 0 || !ctrl.phi_guard) return pad_term;
    return std::min(ctrl.phi_guard(zeta.subspan(0, n0)), pad_term);
  };
  return padded;
}

}  // namespace hysup
