#include "hysup/supervisor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hysup {

void SupervisorParams::validate() const {
  if (!(eps0a > 0.0)) throw InvalidParams("supervisor: eps0a must be positive");
  if (!(eps1a > 0.0)) throw InvalidParams("supervisor: eps1a must be positive");
  if (!(tau_star > 0.0)) throw InvalidParams("supervisor: tau_star must be positive");
  if (!(eq_tol > 0.0)) throw InvalidParams("supervisor: eq_tol must be positive");
}

State SupervisedLayout::pack(std::span<const double> xi0, std::span<const double> z0v,
                             std::span<const double> z1v, double z0s, double z1s, int qv,
                             double tauv) const {
  State x(dim(), 0.0);
  std::copy(xi0.begin(), xi0.end(), x.begin() + xi());
  std::copy(z0v.begin(), z0v.end(), x.begin() + zeta0());
  std::copy(z1v.begin(), z1v.end(), x.begin() + zeta1());
  x[z0()] = z0s;
  x[z1()] = z1s;
  x[q()] = static_cast<double>(qv);
  x[tau()] = tauv;
  return x;
}

State SupervisedLayout::pack(const SupervisedState& s) const {
  return pack(s.xi, s.zeta0, s.zeta1, s.z0, s.z1, s.q, s.tau);
}

SupervisedState SupervisedLayout::unpack(std::span<const double> x) const {
  SupervisedState s;
  s.xi.assign(x.begin() + xi(), x.begin() + xi() + n_p);
  s.zeta0.assign(x.begin() + zeta0(), x.begin() + zeta0() + n_c);
  s.zeta1.assign(x.begin() + zeta1(), x.begin() + zeta1() + n_c);
  s.z0 = x[z0()];
  s.z1 = x[z1()];
  s.q = x[q()] < 0.5 ? 0 : 1;
  s.tau = x[tau()];
  return s;
}

std::vector<std::string> SupervisedLayout::column_names() const {
  std::vector<std::string> cols;
  for (int i = 0; i < n_p; ++i) cols.push_back("xi" + std::to_string(i));
  for (int i = 0; i < n_c; ++i) cols.push_back("zeta0_" + std::to_string(i));
  for (int i = 0; i < n_c; ++i) cols.push_back("zeta1_" + std::to_string(i));
  cols.push_back("z0");
  cols.push_back("z1");
  cols.push_back("q");
  cols.push_back("tau");
  return cols;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double vacuous_or(const std::function<double(std::span<const double>)>& g,
                  std::span<const double> zeta) {
  return g ? g(zeta) : 1.0;
}

}  // namespace

SupervisedSystem build_supervised_system(const Plant& plant, const HybridController& k0,
                                         const HybridController& k1, const NormObserverSpec& obs0,
                                         const NormObserverSpec& obs1,
                                         const SupervisorParams& params) {
  params.validate();
  if (k0.n_c != k1.n_c)
    throw DimensionMismatch("build_supervised_system: controllers must share n_c (pad first)");
  if (plant.outputs.size() < 2)
    throw DimensionMismatch("build_supervised_system: plant must expose two outputs");
  if (plant.outputs[0].dim != k0.m_c || plant.outputs[1].dim != k1.m_c)
    throw DimensionMismatch("build_supervised_system: controller input dimensions mismatch outputs");

  SupervisedLayout lay{plant.n_p, k0.n_c};

  State phi0 = params.phi0_reset.empty() ? k0.phi_rep : params.phi0_reset;
  State phi1 = params.phi1_reset.empty() ? k1.phi_rep : params.phi1_reset;
  phi0.resize(lay.n_c, 0.0);
  phi1.resize(lay.n_c, 0.0);

  const double eps0a = params.eps0a;
  const double eps1a = params.eps1a;
  const double tau_star = params.tau_star;
  const double band = params.eq_tol;

  auto h0 = plant.outputs[0].h;
  auto h1 = plant.outputs[1].h;

  HybridSystemDef sys;
  sys.dim = lay.dim();

  sys.flow_map = [plant, k0, k1, obs0, obs1, lay, h0, h1](std::span<const double> x,
                                                          std::span<double> dx) {
    std::fill(dx.begin(), dx.end(), 0.0);
    auto xi = lay.xi_of(x);
    const bool local = x[lay.q()] < 0.5;
    if (local) {
      const State y0 = h0(xi);
      auto zeta0 = lay.zeta0_of(x);
      plant.f_p(xi, k0.kappa(y0, zeta0), dx.subspan(lay.xi(), lay.n_p));
      if (lay.n_c > 0 && k0.f_c) k0.f_c(y0, zeta0, dx.subspan(lay.zeta0(), lay.n_c));
      dx[lay.z0()] = observer_flow(obs0, x[lay.z0()], norm2(y0));
      dx[lay.tau()] = 0.0;
    } else {
      const State y1 = h1(xi);
      auto zeta1 = lay.zeta1_of(x);
      plant.f_p(xi, k1.kappa(y1, zeta1), dx.subspan(lay.xi(), lay.n_p));
      if (lay.n_c > 0 && k1.f_c) k1.f_c(y1, zeta1, dx.subspan(lay.zeta1(), lay.n_c));
      dx[lay.z1()] = observer_flow(obs1, x[lay.z1()], norm2(y1));
      dx[lay.tau()] = 1.0;
    }
  };

  // Membership bands for the equality constraints; exact equality never
  // holds in floating point and the supervisor's own resets land exactly
  // on zero, so the band only absorbs integration drift.
  auto eq = [band](double v) { return band - std::abs(v); };

  auto supervisor_flow_guard = [=](std::span<const double> x) {
    const double q = x[lay.q()];
    const double z0 = x[lay.z0()];
    const double z1 = x[lay.z1()];
    const double tau = x[lay.tau()];
    const double in0 = 0.5 - q;
    const double in1 = q - 0.5;
    const double phi0_ok = vacuous_or(k0.phi_guard, lay.zeta0_of(x));
    const double phi1_ok = vacuous_or(k1.phi_guard, lay.zeta1_of(x));

    const double c_sa = std::min({phi1_ok, std::min(eps0a - z0, z0), eq(z1), in0, eq(tau)});
    const double c_sb = std::min({phi0_ok, eq(z0), z1 - eps1a, in1});
    const double c_sc = std::min({phi0_ok, eq(z0), z1, in1, tau_star - tau});
    return std::max({c_sa, c_sb, c_sc});
  };

  auto active_flow_factor = [=](std::span<const double> x) {
    auto xi = lay.xi_of(x);
    if (x[lay.q()] < 0.5) {
      if (!k0.flow_guard) return 1.0;
      return k0.flow_guard(h0(xi), lay.zeta0_of(x));
    }
    if (!k1.flow_guard) return 1.0;
    return k1.flow_guard(h1(xi), lay.zeta1_of(x));
  };

  sys.flow_guard = [=](std::span<const double> x) {
    return std::min(active_flow_factor(x), supervisor_flow_guard(x));
  };

  auto supervisor_jump_guard = [=](std::span<const double> x) {
    const double q = x[lay.q()];
    const double z0 = x[lay.z0()];
    const double z1 = x[lay.z1()];
    const double tau = x[lay.tau()];
    const double in0 = 0.5 - q;
    const double in1 = q - 0.5;
    const double phi0_ok = vacuous_or(k0.phi_guard, lay.zeta0_of(x));
    const double phi1_ok = vacuous_or(k1.phi_guard, lay.zeta1_of(x));

    const double d_sa = std::min({phi1_ok, z0 - eps0a, eq(z1), in0, eq(tau)});
    const double d_sb = std::min({phi0_ok, eq(z0), std::min(eps1a - z1, z1), in1, tau - tau_star});
    return std::max(d_sa, d_sb);
  };

  auto active_jump_factor = [=](std::span<const double> x) {
    auto xi = lay.xi_of(x);
    if (x[lay.q()] < 0.5) {
      if (!k0.jump_guard) return -1.0;
      return k0.jump_guard(h0(xi), lay.zeta0_of(x));
    }
    if (!k1.jump_guard) return -1.0;
    return k1.jump_guard(h1(xi), lay.zeta1_of(x));
  };

  sys.jump_guard = [=](std::span<const double> x) {
    return std::max(active_jump_factor(x), supervisor_jump_guard(x));
  };

  sys.jump_map = [=](std::span<const double> x) {
    std::vector<State> successors;
    const bool local = x[lay.q()] < 0.5;

    // Supervisor reset: (xi, Phi0, Phi1, 0, 0, 1-q, 0).
    if (supervisor_jump_guard(x) >= 0.0) {
      State s(x.begin(), x.end());
      std::copy(phi0.begin(), phi0.end(), s.begin() + lay.zeta0());
      std::copy(phi1.begin(), phi1.end(), s.begin() + lay.zeta1());
      s[lay.z0()] = 0.0;
      s[lay.z1()] = 0.0;
      s[lay.q()] = local ? 1.0 : 0.0;
      s[lay.tau()] = 0.0;
      successors.push_back(std::move(s));
    }

    // Active controller jump: g_c on zeta_q plus the estimator update on z_q.
    if (active_jump_factor(x) >= 0.0 && lay.n_c > 0) {
      auto xi = lay.xi_of(x);
      if (local && k0.g_c) {
        const State y0 = h0(xi);
        const double zp = observer_jump(obs0, x[lay.z0()], norm2(y0));
        for (const auto& zeta_next : k0.g_c(y0, lay.zeta0_of(x))) {
          State s(x.begin(), x.end());
          std::copy(zeta_next.begin(), zeta_next.end(), s.begin() + lay.zeta0());
          s[lay.z0()] = zp;
          successors.push_back(std::move(s));
        }
      } else if (!local && k1.g_c) {
        const State y1 = h1(xi);
        const double zp = observer_jump(obs1, x[lay.z1()], norm2(y1));
        for (const auto& zeta_next : k1.g_c(y1, lay.zeta1_of(x))) {
          State s(x.begin(), x.end());
          std::copy(zeta_next.begin(), zeta_next.end(), s.begin() + lay.zeta1());
          s[lay.z1()] = zp;
          successors.push_back(std::move(s));
        }
      }
    }
    return successors;
  };

  sys.output = [=](std::span<const double> x) {
    auto xi = lay.xi_of(x);
    return x[lay.q()] < 0.5 ? h0(xi) : h1(xi);
  };

  SupervisedSystem out;
  out.def = std::move(sys);
  out.layout = lay;
  out.dist_A0 = k0.dist_target;
  out.dist_A1 = k1.dist_target;
  return out;
}

std::function<bool(std::span<const double>)> make_convergence_monitor(
    const SupervisedSystem& sys, double conv_tol) {
  auto lay = sys.layout;
  auto dist = sys.dist_A0;
  return [lay, dist, conv_tol](std::span<const double> x) {
    return x[lay.q()] < 0.5 && dist(lay.xi_of(x)) <= conv_tol;
  };
}

// ---------------------------------------------------------------------------
// Design procedure
// ---------------------------------------------------------------------------

void DesignInputs::validate() const {
  if (!(eps0b > 0.0) || !(eps1b > 0.0))
    throw InvalidParams("design: sublevel parameters must be positive");
  if (!(Delta >= 0.0) || !(Delta1 >= 0.0) || !(Delta2 >= 0.0))
    throw InvalidParams("design: Delta values must be nonnegative");
  if (!alpha01_inv || !alpha02 || !alpha11_inv || !alpha12)
    throw InvalidParams("design: all four comparison functions are required");
}

Step3Result design_step3_check(const DesignInputs& in, double eps1a, double tau_star) {
  in.validate();
  auto bbar0 = [&](double s, double t) { return 2.0 * std::exp(-in.eps0 * t) * in.alpha02(s); };
  auto bbar1 = [&](double s, double t) { return 2.0 * std::exp(-in.eps1 * t) * in.alpha12(s); };

  const double inner = in.Delta1 + bbar0(in.Delta2, tau_star);
  const double mid = in.Delta + in.alpha01_inv(inner);
  const double lhs = in.alpha12(in.alpha11_inv(eps1a + bbar1(mid, tau_star)));
  return {lhs <= in.eps1b, lhs};
}

std::optional<double> find_dwell_time(const DesignInputs& in, double eps1a,
                                      std::span<const double> tau_grid) {
  for (std::size_t i = 1; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw InvalidParams("find_dwell_time: grid must be increasing");
  }
  for (double tau : tau_grid) {
    if (design_step3_check(in, eps1a, tau).pass) return tau;
  }
  return std::nullopt;
}

Step2Report design_step2_check(const HybridSystemDef& local_loop,
                               std::function<double(std::span<const double>)> V0,
                               std::function<double(std::span<const double>)> V1,
                               std::function<double(double)> gamma0, double eps0a, double eps0b,
                               double eps1b, double eps0, const Step2Config& cfg) {
  if (!(eps0a > 0.0)) throw InvalidParams("design step 2: eps0a must be positive");
  if (!(eps0a < eps0b)) throw InvalidParams("design step 2: eps0a < eps0b is required");

  const int n = local_loop.dim;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // Bracket the sublevel set {V1 <= eps1b} in a box by doubling until the
  // box boundary clears the level. Each face carries a deterministic grid
  // (so axis-aligned escapes are caught) plus random probes.
  double half_width = 1.0;
  const int boundary_samples = 512;
  const int grid_per_dim = 9;
  while (true) {
    bool clear = true;
    for (int face_dim = 0; face_dim < n && clear; ++face_dim) {
      for (int sign = -1; sign <= 1 && clear; sign += 2) {
        int cells = 1;
        for (int i = 0; i < n - 1; ++i) cells *= grid_per_dim;
        for (int cell = 0; cell < cells && clear; ++cell) {
          State p(n);
          int rest = cell;
          for (int i = 0; i < n; ++i) {
            if (i == face_dim) {
              p[i] = sign * half_width;
            } else {
              const int idx = rest % grid_per_dim;
              rest /= grid_per_dim;
              p[i] = half_width * (2.0 * idx / (grid_per_dim - 1) - 1.0);
            }
          }
          if (V1(p) <= eps1b) clear = false;
        }
      }
    }
    std::mt19937_64 brng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    for (int s = 0; s < boundary_samples && clear; ++s) {
      State p(n);
      for (int i = 0; i < n; ++i) p[i] = half_width * unit(brng);
      const int face = static_cast<int>(brng() % static_cast<std::uint64_t>(n));
      p[face] = (brng() & 1) ? half_width : -half_width;
      if (V1(p) <= eps1b) clear = false;
    }
    if (clear) break;
    half_width *= 2.0;
    if (half_width > cfg.box_limit)
      throw UnboundedSublevel("design step 2: sublevel set of V1 cannot be bracketed");
  }

  Step2Report report;
  report.pass = true;
  report.worst_margin = std::numeric_limits<double>::infinity();

  auto note = [&](double margin, const State& at, HybridTimeStamp stamp) {
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_state = at;
      report.worst_at = stamp;
    }
    if (margin <= 0.0) report.pass = false;
  };

  const double bound = eps0a * eps0;
  int accepted = 0;
  int attempts = 0;
  const int max_attempts = cfg.sample_budget * 10000;
  while (accepted < cfg.sample_budget && attempts < max_attempts) {
    ++attempts;
    State x0(n);
    for (int i = 0; i < n; ++i) x0[i] = half_width * unit(rng);
    if (V1(x0) > eps1b) continue;
    ++accepted;

    // Containment {V1 <= eps1b} within {V0 <= eps0b}.
    note(eps0b - V0(x0), x0, {0.0, 0});

    SolverConfig scfg = cfg.solver;
    scfg.max_t = cfg.sim_horizon;
    try {
      const HybridArc arc = solve(local_loop, x0, scfg);
      for (const auto& iv : arc.intervals) {
        for (const auto& smp : iv.samples) {
          const State y = local_loop.output(smp.x);
          double ynorm = 0.0;
          for (double v : y) ynorm += v * v;
          note(bound - gamma0(std::sqrt(ynorm)), smp.x, {smp.t, iv.j});
        }
      }
    } catch (const NumericalBlowup&) {
      // An escaping sample is a definitive counterexample.
      note(-std::numeric_limits<double>::infinity(), x0, {0.0, 0});
    }
  }
  if (accepted == 0)
    throw UnboundedSublevel("design step 2: no samples landed in the V1 sublevel set");
  return report;
}

// ---------------------------------------------------------------------------
// Arc inspection
// ---------------------------------------------------------------------------

SwitchingCensus switching_census(const HybridArc& arc, const SupervisedLayout& layout) {
  SwitchingCensus census;
  double last_1to0 = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k + 1 < arc.intervals.size(); ++k) {
    const auto& pre = arc.intervals[k].samples.back();
    const auto& post = arc.intervals[k + 1].samples.front();
    const int q_pre = pre.x[layout.q()] < 0.5 ? 0 : 1;
    const int q_post = post.x[layout.q()] < 0.5 ? 0 : 1;
    if (q_pre == q_post) continue;
    census.events.push_back({pre.t, arc.intervals[k].j, q_pre, q_post});
    if (q_pre == 0) {
      ++census.count_0to1;
    } else {
      ++census.count_1to0;
      if (!std::isnan(last_1to0)) {
        census.min_dwell_t = std::min(census.min_dwell_t, pre.t - last_1to0);
      }
      last_1to0 = pre.t;
    }
  }
  return census;
}

std::vector<PhaseViolation> check_phase_observer_bounds(const HybridArc& arc,
                                                        const SupervisedLayout& layout,
                                                        const NormObserverSpec& obs0,
                                                        const NormObserverSpec& obs1) {
  std::vector<PhaseViolation> phases;
  if (arc.empty()) return phases;

  auto loop_state = [&](const Sample& s, int q) {
    State v(s.x.begin() + layout.xi(), s.x.begin() + layout.xi() + layout.n_p);
    const int z_off = q == 0 ? layout.zeta0() : layout.zeta1();
    v.insert(v.end(), s.x.begin() + z_off, s.x.begin() + z_off + layout.n_c);
    return v;
  };

  std::size_t k = 0;
  while (k < arc.intervals.size()) {
    const int q = arc.intervals[k].samples.front().x[layout.q()] < 0.5 ? 0 : 1;
    const auto& obs = q == 0 ? obs0 : obs1;
    if (!obs.V || !obs.dist)
      throw MissingLyapunov("check_phase_observer_bounds: observer specs need V and dist");

    const auto& start = arc.intervals[k].samples.front();
    const double t0 = start.t;
    const int j0 = arc.intervals[k].j;
    const State s_start = loop_state(start, q);
    const double z_start = start.x[q == 0 ? layout.z0() : layout.z1()];
    const double s0 = obs.dist(s_start) + std::abs(z_start);

    PhaseViolation phase;
    phase.q = q;
    phase.start_t = t0;
    phase.max_violation = -std::numeric_limits<double>::infinity();

    while (k < arc.intervals.size()) {
      const auto& iv = arc.intervals[k];
      const int q_here = iv.samples.front().x[layout.q()] < 0.5 ? 0 : 1;
      if (q_here != q) break;
      for (const auto& smp : iv.samples) {
        const State xs = loop_state(smp, q);
        const double z = smp.x[q == 0 ? layout.z0() : layout.z1()];
        const double v = obs.V(xs) - z - beta(obs, s0, smp.t - t0, iv.j - j0);
        phase.max_violation = std::max(phase.max_violation, v);
      }
      ++k;
    }
    phases.push_back(phase);
  }
  return phases;
}

}  // namespace hysup
