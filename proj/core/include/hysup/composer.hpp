#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hysup/hybrid.hpp"

namespace hysup {

struct PlantOutput {
  int dim = 0;
  std::function<State(std::span<const double> xi)> h;
};

/// Continuous-time plant xi' = f_p(xi, u) with a list of measured outputs,
/// one per controller that may be attached.
struct Plant {
  int n_p = 0;  // state dimension
  int m_p = 0;  // input dimension
  std::function<void(std::span<const double> xi, std::span<const double> u, std::span<double> dxi)> f_p;
  std::vector<PlantOutput> outputs;
};

/// Output-feedback hybrid controller (kappa, C_c, f_c, D_c, g_c) plus the
/// reset set it converges to and the plant target set it stabilizes.
///
/// A state-free controller (n_c == 0) has empty controller flow and jump
/// sets; in composition it constrains nothing and never jumps.
struct HybridController {
  int n_c = 0;  // controller state dimension (0: static controller)
  int m_c = 0;  // input dimension (matches the measured plant output)

  std::function<State(std::span<const double> y, std::span<const double> zeta)> kappa;
  std::function<void(std::span<const double> y, std::span<const double> zeta, std::span<double> dzeta)> f_c;

  /// Signed guards of C_c / D_c over (y, zeta); null for static controllers.
  std::function<double(std::span<const double> y, std::span<const double> zeta)> flow_guard;
  std::function<double(std::span<const double> y, std::span<const double> zeta)> jump_guard;

  std::function<std::vector<State>(std::span<const double> y, std::span<const double> zeta)> g_c;

  State phi_rep;  // representative point of the compact reset set
  std::function<double(std::span<const double> zeta)> phi_guard;  // >=0 <=> zeta in reset set

  std::function<double(std::span<const double> xi)> dist_target;  // |xi| relative to the target set
};

/// Closes the loop u_c = y_{p,i}, u_p = y_c over state (xi, zeta).
/// The plant component never jumps: every jump-map element keeps xi.
HybridSystemDef compose_closed_loop(const Plant& plant, const HybridController& ctrl,
                                    int output_index);

State evaluate_controller(const HybridController& ctrl, std::span<const double> y,
                          std::span<const double> zeta);

/// Embeds a controller into a larger state dimension by zero-padding, for
/// supervising two controllers of unequal n_c. Extra components flow at zero
/// rate, reset to zero, and carry a unit-band reset-set guard.
HybridController pad_controller(const HybridController& ctrl, int n_c_target);

}  // namespace hysup
