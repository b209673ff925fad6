#include "hysup/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hysup {

std::string to_string(Termination term) {
  switch (term) {
    case Termination::HorizonT: return "HorizonT";
    case Termination::HorizonJ: return "HorizonJ";
    case Termination::FlowSetExit: return "FlowSetExit";
    case Termination::NoProgress: return "NoProgress";
    case Termination::Converged: return "Converged";
  }
  return "?";
}

HybridTimeDomain HybridArc::domain() const {
  HybridTimeDomain dom;
  dom.intervals.reserve(intervals.size());
  for (const auto& iv : intervals) {
    dom.intervals.push_back({iv.samples.front().t, iv.samples.back().t, iv.j});
  }
  return dom;
}

std::size_t HybridArc::sample_count() const {
  std::size_t n = 0;
  for (const auto& iv : intervals) n += iv.samples.size();
  return n;
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidConfig("SolverConfig: dt must be positive");
  if (!(guard_tol > 0.0)) throw InvalidConfig("SolverConfig: guard_tol must be positive");
  if (refine_iters < 1) throw InvalidConfig("SolverConfig: refine_iters must be >= 1");
  if (!(max_t > 0.0)) throw InvalidConfig("SolverConfig: max_t must be positive");
  if (max_j < 1) throw InvalidConfig("SolverConfig: max_j must be >= 1");
}

void rk4_step(const HybridSystemDef& system, std::span<const double> x, double h,
              std::span<double> out) {
  const std::size_t n = x.size();
  State k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto eval = [&](const State& at, State& k) {
    system.flow_map(at, k);
    for (double v : k) {
      if (!std::isfinite(v)) throw NumericalBlowup("flow map returned a non-finite value");
    }
  };

  State x0(x.begin(), x.end());
  eval(x0, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x0[i] + 0.5 * h * k1[i];
  eval(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x0[i] + 0.5 * h * k2[i];
  eval(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x0[i] + h * k3[i];
  eval(tmp, k4);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(out[i])) throw NumericalBlowup("integration step produced a non-finite state");
  }
}

namespace {

// Refines the event fraction within a single RK4 step: `event` is false at
// theta = 0 and true at theta = 1. Halves cfg.refine_iters times and returns
// the event side of the final bracket.
double bisect_crossing(const HybridSystemDef& system, std::span<const double> x, double h,
                       const std::function<bool(std::span<const double>)>& event,
                       const SolverConfig& cfg) {
  double lo = 0.0, hi = 1.0;
  State probe(x.size());
  for (int i = 0; i < cfg.refine_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    rk4_step(system, x, mid * h, probe);
    if (event(probe)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct AdvanceOptions {
  bool detect_jump_crossing = true;
  // Called after each accepted step with (local elapsed, state);
  // returning false stops the integration early (monitor hook).
  std::function<bool(double, std::span<const double>)> sink;
};

struct AdvanceResult {
  State x;
  double elapsed = 0.0;
  FlowHit hit = FlowHit::Budget;
  bool stopped = false;
};

AdvanceResult advance(const HybridSystemDef& system, std::span<const double> x0,
                      double t_budget, const SolverConfig& cfg, const AdvanceOptions& opt) {
  AdvanceResult res;
  res.x.assign(x0.begin(), x0.end());
  State next(x0.size());

  double d_prev = system.jump_guard(res.x);

  while (res.elapsed < t_budget) {
    const double h = std::min(cfg.dt, t_budget - res.elapsed);
    rk4_step(system, res.x, h, next);
    const double c_new = system.flow_guard(next);
    const double d_new = system.jump_guard(next);

    const bool jump_cross = opt.detect_jump_crossing && d_prev < 0.0 && d_new >= 0.0;
    const bool flow_exit = c_new < 0.0;

    if (jump_cross || flow_exit) {
      const auto jump_event = [&](std::span<const double> s) { return system.jump_guard(s) >= 0.0; };
      const auto exit_event = [&](std::span<const double> s) { return system.flow_guard(s) < 0.0; };
      double theta;
      FlowHit hit;
      if (jump_cross && flow_exit) {
        const double tj = bisect_crossing(system, res.x, h, jump_event, cfg);
        const double tc = bisect_crossing(system, res.x, h, exit_event, cfg);
        // Ties go to the jump event.
        if (tj <= tc) {
          theta = tj;
          hit = FlowHit::JumpGuard;
        } else {
          theta = tc;
          hit = FlowHit::FlowExit;
        }
      } else if (jump_cross) {
        theta = bisect_crossing(system, res.x, h, jump_event, cfg);
        hit = FlowHit::JumpGuard;
      } else {
        theta = bisect_crossing(system, res.x, h, exit_event, cfg);
        hit = FlowHit::FlowExit;
      }
      rk4_step(system, res.x, theta * h, next);
      res.x = next;
      res.elapsed += theta * h;
      res.hit = hit;
      if (opt.sink && !opt.sink(res.elapsed, res.x)) res.stopped = true;
      return res;
    }

    res.x = next;
    res.elapsed += h;
    d_prev = d_new;
    if (opt.sink && !opt.sink(res.elapsed, res.x)) {
      res.stopped = true;
      res.hit = FlowHit::Budget;
      return res;
    }
  }
  res.hit = FlowHit::Budget;
  return res;
}

}  // namespace

FlowResult advance_flow(const HybridSystemDef& system, std::span<const double> x,
                        double t_budget, const SolverConfig& cfg) {
  cfg.validate();
  AdvanceOptions opt;
  auto r = advance(system, x, t_budget, cfg, opt);
  return {std::move(r.x), r.elapsed, r.hit};
}

State apply_jump(const HybridSystemDef& system, std::span<const double> x, std::size_t selector) {
  auto successors = system.jump_map(x);
  if (successors.empty()) throw EmptyJumpMap("jump map enumerated zero successors");
  if (selector >= successors.size()) selector = 0;
  return successors[selector];
}

HybridArc solve(const HybridSystemDef& system, const State& x0, const SolverConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(x0.size()) != system.dim)
    throw DimensionMismatch("solve: x0 dimension does not match the system");

  HybridArc arc;
  arc.intervals.push_back({0, {{0.0, x0}}});

  double t = 0.0;
  int j = 0;
  State x = x0;

  if (system.flow_guard(x) < -cfg.guard_tol && system.jump_guard(x) < -cfg.guard_tol) {
    arc.termination = Termination::NoProgress;
    return arc;
  }

  int jumps_at_instant = 0;
  double t_last_jump = -1.0;
  double monitor_hold = 0.0;
  const double t_eps = 1e-12 * std::max(1.0, cfg.max_t);

  // Applies one jump; reports the per-instant Zeno trip or the exhausted
  // jump budget through `term`.
  auto take_jump = [&](Termination& term) -> bool {
    if (t_last_jump >= 0.0 && t - t_last_jump <= cfg.guard_tol) {
      if (jumps_at_instant + 1 > cfg.max_j) {
        term = Termination::NoProgress;
        return false;
      }
      ++jumps_at_instant;
    } else {
      jumps_at_instant = 1;
    }
    if (j >= cfg.max_j) {
      term = Termination::HorizonJ;
      return false;
    }
    t_last_jump = t;
    x = apply_jump(system, x);
    ++j;
    arc.intervals.push_back({j, {{t, x}}});
    monitor_hold = 0.0;
    return true;
  };

  while (true) {
    if (t >= cfg.max_t - t_eps) {
      arc.termination = Termination::HorizonT;
      return arc;
    }

    const double c = system.flow_guard(x);
    const double d = system.jump_guard(x);

    bool do_jump;
    if (cfg.jump_priority == JumpPriority::JumpFirst) {
      do_jump = d >= 0.0 || (d >= -cfg.guard_tol && c < -cfg.guard_tol);
    } else {
      do_jump = d >= -cfg.guard_tol && c < -cfg.guard_tol;
    }

    if (do_jump) {
      if (!take_jump(arc.termination)) return arc;
      continue;
    }

    if (c < -cfg.guard_tol) {
      arc.termination = Termination::FlowSetExit;
      return arc;
    }

    AdvanceOptions opt;
    opt.detect_jump_crossing = cfg.jump_priority == JumpPriority::JumpFirst;
    bool converged = false;
    double prev_elapsed = 0.0;
    auto* interval = &arc.intervals.back();
    opt.sink = [&](double elapsed, std::span<const double> xs) {
      interval->samples.push_back({t + elapsed, State(xs.begin(), xs.end())});
      if (cfg.converged) {
        if (cfg.converged(xs)) {
          monitor_hold += elapsed - prev_elapsed;
          if (monitor_hold >= cfg.converge_hold) {
            converged = true;
            prev_elapsed = elapsed;
            return false;
          }
        } else {
          monitor_hold = 0.0;
        }
      }
      prev_elapsed = elapsed;
      return true;
    };

    auto r = advance(system, x, cfg.max_t - t, cfg, opt);
    t += r.elapsed;
    x = std::move(r.x);

    if (converged) {
      arc.termination = Termination::Converged;
      return arc;
    }

    if (r.hit == FlowHit::Budget) {
      arc.termination = Termination::HorizonT;
      return arc;
    }
    if (r.hit == FlowHit::JumpGuard) {
      continue;  // refined point lies on the jump-set side; next iteration jumps
    }

    // Flow exit: jump when the jump set is enabled at the boundary.
    if (system.jump_guard(x) >= -cfg.guard_tol) {
      if (!take_jump(arc.termination)) return arc;
      continue;
    }
    arc.termination = Termination::FlowSetExit;
    return arc;
  }
}

double guard_regularity(const HybridSystemDef& system, double box_halfwidth, int samples,
                        std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  State a(system.dim), b(system.dim), lo(system.dim), hi(system.dim), mid(system.dim);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < system.dim; ++i) {
      a[i] = box_halfwidth * unit(rng);
      b[i] = a[i] + 0.1 * box_halfwidth * unit(rng);
    }
    for (const auto& guard : {system.flow_guard, system.jump_guard}) {
      if ((guard(a) >= 0.0) == (guard(b) >= 0.0)) continue;
      // Bisect the membership flip, then measure the guard gap across it.
      lo = a;
      hi = b;
      const bool lo_in = guard(lo) >= 0.0;
      for (int it = 0; it < 40; ++it) {
        for (int i = 0; i < system.dim; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
        if ((guard(mid) >= 0.0) == lo_in) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      double span = 0.0;
      for (int i = 0; i < system.dim; ++i) span += (hi[i] - lo[i]) * (hi[i] - lo[i]);
      worst = std::max(worst, std::abs(guard(hi) - guard(lo)) / std::max(std::sqrt(span), h));
    }
  }
  return worst;
}

std::vector<Violation> check_solution(const HybridArc& arc, const HybridSystemDef& system,
                                      double tol, double deriv_rel_tol) {
  std::vector<Violation> out;
  if (arc.empty()) return out;

  int expected_j = arc.intervals.front().j;
  double prev_t = arc.intervals.front().samples.front().t;

  for (std::size_t k = 0; k < arc.intervals.size(); ++k) {
    const auto& iv = arc.intervals[k];
    if (iv.j != expected_j) {
      out.push_back({Violation::Kind::DomainOrder, {iv.samples.front().t, iv.j}, 0.0,
                     "jump index does not increment by one"});
    }
    ++expected_j;

    for (std::size_t s = 0; s < iv.samples.size(); ++s) {
      const auto& smp = iv.samples[s];
      if (smp.t < prev_t - 1e-12) {
        out.push_back({Violation::Kind::DomainOrder, {smp.t, iv.j}, prev_t - smp.t,
                       "sample times decrease"});
      }
      prev_t = smp.t;

      // (S1) holds on [min I_j, sup I_j): the final sample may sit in D only.
      const bool interior = s + 1 < iv.samples.size() || k + 1 == arc.intervals.size();
      if (interior) {
        const double c = system.flow_guard(smp.x);
        if (c < -tol) {
          out.push_back({Violation::Kind::FlowSet, {smp.t, iv.j}, -c,
                         "flow-set membership violated"});
        }
      }
    }

    // Derivative consistency by finite differences against the flow map.
    State f(system.dim);
    for (std::size_t s = 0; s + 1 < iv.samples.size(); ++s) {
      const auto& a = iv.samples[s];
      const auto& b = iv.samples[s + 1];
      const double h = b.t - a.t;
      if (h <= 0.0) continue;
      State mid(system.dim);
      for (int i = 0; i < system.dim; ++i) mid[i] = 0.5 * (a.x[i] + b.x[i]);
      system.flow_map(mid, f);
      double err2 = 0.0, ref2 = 0.0;
      for (int i = 0; i < system.dim; ++i) {
        const double fd = (b.x[i] - a.x[i]) / h;
        err2 += (fd - f[i]) * (fd - f[i]);
        ref2 += f[i] * f[i];
      }
      const double err = std::sqrt(err2);
      const double ref = std::sqrt(ref2);
      if (err > deriv_rel_tol * (1.0 + ref)) {
        out.push_back({Violation::Kind::FlowDerivative, {a.t, iv.j}, err,
                       "finite-difference derivative inconsistent with flow map"});
      }
    }

    // (S2) at the jump into the next interval.
    if (k + 1 < arc.intervals.size()) {
      const auto& pre = iv.samples.back();
      const auto& post = arc.intervals[k + 1].samples.front();
      const double d = system.jump_guard(pre.x);
      if (d < -tol) {
        out.push_back({Violation::Kind::JumpSet, {pre.t, iv.j}, -d,
                       "jump-set membership violated at jump"});
      }
      auto successors = system.jump_map(pre.x);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& g : successors) {
        double dist2 = 0.0;
        for (int i = 0; i < system.dim; ++i) dist2 += (post.x[i] - g[i]) * (post.x[i] - g[i]);
        best = std::min(best, std::sqrt(dist2));
      }
      double scale2 = 0.0;
      for (int i = 0; i < system.dim; ++i) scale2 += post.x[i] * post.x[i];
      if (successors.empty() || best > tol * (1.0 + std::sqrt(scale2))) {
        out.push_back({Violation::Kind::JumpMap, {pre.t, iv.j}, best,
                       "post-jump state is not an element of the jump map"});
      }
    }
  }
  return out;
}

}  // namespace hysup
