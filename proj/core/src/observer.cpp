#include "hysup/observer.hpp"

#include <cmath>
#include <limits>

namespace hysup {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void NormObserverSpec::validate() const {
  if (!(eps > 0.0) || eps > 1.0) throw InvalidParams("observer: eps must lie in (0, 1]");
  if (!gamma || !alpha1 || !alpha2) throw InvalidParams("observer: gamma and envelopes required");
  if (std::abs(gamma(0.0)) > 1e-12) throw InvalidParams("observer: gamma(0) must be 0");

  // Sampled class-K checks on [0, 1e3]; full verification of black-box
  // callables is not possible.
  const int n = 10000;
  double prev = gamma(0.0);
  for (int i = 1; i <= n; ++i) {
    const double s = 1e3 * static_cast<double>(i) / n;
    const double g = gamma(s);
    if (g < prev - 1e-9 * (1.0 + std::abs(prev)))
      throw InvalidParams("observer: gamma must be nondecreasing");
    prev = g;
    const double a1 = alpha1(s);
    const double a2 = alpha2(s);
    if (a1 > a2 + 1e-9 * (1.0 + std::abs(a2)))
      throw InvalidParams("observer: alpha1 must not exceed alpha2");
    if (a2 < s - 1e-9 * (1.0 + s))
      throw InvalidParams("observer: alpha2(s) >= s is required");
  }
}

double observer_flow(const NormObserverSpec& spec, double z, double y_norm) {
  return -spec.eps * z + spec.gamma(y_norm);
}

double observer_jump(const NormObserverSpec& spec, double z, double y_norm) {
  return (1.0 - spec.eps) * z + spec.gamma(y_norm);
}

double observer_flow(const NormObserverSpec& spec, double z, std::span<const double> y) {
  return observer_flow(spec, z, norm2(y));
}

double observer_jump(const NormObserverSpec& spec, double z, std::span<const double> y) {
  return observer_jump(spec, z, norm2(y));
}

double beta(const NormObserverSpec& spec, double s, double t, int j) {
  return 2.0 * std::exp(-spec.eps * t) * std::pow(1.0 - spec.eps, j) * spec.alpha2(s);
}

namespace {

double alpha1_inverse(const NormObserverSpec& spec, double v) {
  if (spec.alpha1_inv) return spec.alpha1_inv(v);
  if (!spec.alpha1) throw BracketFailure("state_norm_bound: no alpha1 available for inversion");
  if (v <= 0.0) return 0.0;

  double hi = 1.0;
  int expansions = 0;
  while (spec.alpha1(hi) < v) {
    hi *= 2.0;
    if (++expansions > 200) throw BracketFailure("state_norm_bound: could not bracket alpha1 inverse");
  }
  double lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (spec.alpha1(mid) < v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

double state_norm_bound(const NormObserverSpec& spec, double z, double x0_dist, double z0,
                        double t, int j) {
  return alpha1_inverse(spec, z + beta(spec, x0_dist + z0, t, j));
}

HybridSystemDef attach_observer(const HybridSystemDef& loop, const NormObserverSpec& spec) {
  if (!loop.output) throw InvalidParams("attach_observer: loop must expose an output");

  HybridSystemDef sys;
  sys.dim = loop.dim + 1;
  const int n = loop.dim;

  sys.flow_map = [loop, spec, n](std::span<const double> x, std::span<double> dx) {
    auto base = x.subspan(0, n);
    loop.flow_map(base, dx.subspan(0, n));
    dx[n] = observer_flow(spec, x[n], loop.output(base));
  };
  sys.flow_guard = [loop, n](std::span<const double> x) { return loop.flow_guard(x.subspan(0, n)); };
  sys.jump_guard = [loop, n](std::span<const double> x) { return loop.jump_guard(x.subspan(0, n)); };
  sys.jump_map = [loop, spec, n](std::span<const double> x) {
    auto base = x.subspan(0, n);
    const double zp = observer_jump(spec, x[n], loop.output(base));
    auto successors = loop.jump_map(base);
    std::vector<State> out;
    out.reserve(successors.size());
    for (auto& g : successors) {
      g.push_back(zp);
      out.push_back(std::move(g));
    }
    return out;
  };
  sys.output = [loop, n](std::span<const double> x) { return loop.output(x.subspan(0, n)); };
  return sys;
}

double check_observer_bound(const HybridArc& arc, const NormObserverSpec& spec) {
  if (!spec.V) throw MissingLyapunov("check_observer_bound: spec.V is required");
  if (!spec.dist) throw MissingLyapunov("check_observer_bound: spec.dist is required");
  if (arc.empty()) return 0.0;

  const auto& first = arc.first_sample();
  const int n = static_cast<int>(first.x.size()) - 1;
  const double t0 = first.t;
  const int j0 = arc.intervals.front().j;
  const double s0 = spec.dist(std::span<const double>(first.x.data(), n)) + std::abs(first.x[n]);

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& iv : arc.intervals) {
    for (const auto& s : iv.samples) {
      std::span<const double> base(s.x.data(), n);
      const double v = spec.V(base) - s.x[n] - beta(spec, s0, s.t - t0, iv.j - j0);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace hysup
