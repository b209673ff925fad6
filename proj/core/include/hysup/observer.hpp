#pragma once

#include <functional>
#include <span>

#include "hysup/hybrid.hpp"

namespace hysup {

/// Exponential-decay norm estimator data: z' = -eps z + gamma(|y|) along
/// flows, z+ = (1-eps) z + gamma(|y|) at jumps, together with the
/// class-K-infinity envelopes that turn z into a state-norm certificate.
struct NormObserverSpec {
  double eps = 1.0;  // decay rate in (0, 1]
  std::function<double(double)> gamma;   // class-K gain
  std::function<double(double)> alpha1;  // lower envelope of V
  std::function<double(double)> alpha2;  // upper envelope of V, alpha2(s) >= s
  std::function<double(double)> alpha1_inv;  // optional closed form

  /// Optional certificate data, needed only by the bound checkers: V over the
  /// closed-loop state and the distance to the target-times-reset set.
  std::function<double(std::span<const double> x)> V;
  std::function<double(std::span<const double> x)> dist;

  /// Sampled self-checks of the class-K assumptions (monotone gamma,
  /// alpha1 <= alpha2, alpha2(s) >= s). Throws InvalidParams on failure.
  void validate() const;
};

double observer_flow(const NormObserverSpec& spec, double z, std::span<const double> y);
double observer_jump(const NormObserverSpec& spec, double z, std::span<const double> y);
double observer_flow(const NormObserverSpec& spec, double z, double y_norm);
double observer_jump(const NormObserverSpec& spec, double z, double y_norm);

/// beta(s, t, j) = 2 exp(-eps t) (1 - eps)^j alpha2(s); nonincreasing in t
/// and j, class-K in s.
double beta(const NormObserverSpec& spec, double s, double t, int j);

/// Certified upper bound on the current distance to the target set:
/// alpha1^{-1}(z + beta(x0_dist + z0, t, j)). The inverse is evaluated by
/// bisection on a doubling bracket when no closed form is supplied.
double state_norm_bound(const NormObserverSpec& spec, double z, double x0_dist, double z0,
                        double t, int j);

/// Appends the estimator state to a closed loop that exposes the measured
/// output, so the same solver integrates both.
HybridSystemDef attach_observer(const HybridSystemDef& loop, const NormObserverSpec& spec);

/// Max over all samples of V(x) - z - beta(|x(0,0)|_dist + |z(0,0)|, t, j)
/// for an arc of the observer-augmented loop (z is the last component).
/// A value <= tolerance certifies the estimator bound along the trajectory.
double check_observer_bound(const HybridArc& arc, const NormObserverSpec& spec);

}  // namespace hysup
