#include "hysup/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "hysup/example1.hpp"
#include "hysup/example2.hpp"
#include "hysup/presets.hpp"
#include "hysup/solver.hpp"
#include "hysup/supervisor.hpp"

namespace hysup::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct PresetRun {
  BuiltScenario built;
  HybridArc arc;
  SwitchingCensus census;
  double wall_s = 0.0;
};

PresetRun run_preset(const std::string& name) {
  PresetRun run;
  run.built = build_scenario(make_preset(name));
  const auto start = Clock::now();
  run.arc = solve(run.built.sup.def, run.built.x0, run.built.solver);
  run.wall_s = seconds_since(start);
  run.census = switching_census(run.arc, run.built.sup.layout);
  return run;
}

double final_dist_A0(const PresetRun& run) {
  return run.built.sup.dist_A0(run.built.sup.layout.xi_of(run.arc.last_sample().x));
}

std::vector<CheckResult> suite_solver_order(const SuiteOptions&) {
  std::vector<CheckResult> out;

  HybridSystemDef decay;
  decay.dim = 1;
  decay.flow_map = [](std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
  decay.flow_guard = [](std::span<const double>) { return 1.0; };
  decay.jump_guard = [](std::span<const double>) { return -1.0; };
  decay.jump_map = [](std::span<const double>) { return std::vector<State>{}; };

  auto endpoint_error = [&](double dt) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.max_t = 1.0;
    return std::abs(solve(decay, {1.0}, cfg).last_sample().x[0] - std::exp(-1.0));
  };
  const double ratio = endpoint_error(0.1) / endpoint_error(0.05);
  out.push_back({"halving dt shrinks the endpoint error by >= 12x", ratio >= 12.0, ratio, ""});

  HybridSystemDef timer;
  timer.dim = 1;
  timer.flow_map = [](std::span<const double>, std::span<double> dx) { dx[0] = 1.0; };
  timer.flow_guard = [](std::span<const double> x) { return 1.0 - x[0]; };
  timer.jump_guard = [](std::span<const double> x) { return x[0] - 1.0; };
  timer.jump_map = [](std::span<const double>) { return std::vector<State>{{0.0}}; };
  SolverConfig cfg;
  cfg.guard_tol = 1e-8;
  cfg.max_t = 3.5;
  const auto arc = solve(timer, {0.0}, cfg);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < arc.intervals.size(); ++k) {
    worst = std::max(worst, std::abs(arc.intervals[k].samples.back().x[0] - 1.0));
  }
  out.push_back({"timer events localized within guard_tol = 1e-8", worst <= 1e-8, worst, ""});
  return out;
}

std::vector<CheckResult> suite_ex1_certificates(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  const double a = 0.25;
  std::mt19937_64 rng(opts.seed + 12345);
  std::uniform_real_distribution<double> box(-5.0, 5.0);

  double worst0 = -std::numeric_limits<double>::infinity();
  double worst1 = worst0;
  for (int i = 0; i < 100000; ++i) {
    const State xi = {box(rng), box(rng)};
    const State f0 = ex1::f_loop0(xi);
    const State g0 = ex1::grad_V0(xi);
    worst0 = std::max(worst0, g0[0] * f0[0] + g0[1] * f0[1] + ex1::V0(xi) -
                                  ex1::gamma0(std::abs(xi[0])));
    const State f1 = ex1::f_loop1(xi, a);
    const State g1 = ex1::grad_V1(xi, a);
    worst1 = std::max(worst1, g1[0] * f1[0] + g1[1] * f1[1] + ex1::V1(xi, a));
  }
  out.push_back({"local flow inequality <dV0, f> <= -V0 + gamma0(|y0|) on 1e5 samples",
                 worst0 <= 1e-9, worst0, "max slack"});
  out.push_back({"global flow inequality <dV1, f> <= -V1 on 1e5 samples", worst1 <= 1e-9,
                 worst1, "max slack"});

  const double basin_value = ex1::V0(State{0.0, a});
  out.push_back({"handoff target inside the basin estimate: V0((0, a)) < 1/6",
                 basin_value < 1.0 / 6.0, basin_value, ""});
  return out;
}

std::vector<CheckResult> suite_design(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  const double eps0a = 4.0 / 27.0;
  auto inputs = ex1::design_inputs(0.25, eps0a, 1.0 / 6.0, 0.015, 10.0);

  const auto designed = design_step3_check(inputs, 5e-5, 15.0);
  out.push_back({"dwell condition passes at (eps1a, tau*) = (5e-5, 15) with lhs <= 0.015",
                 designed.pass && designed.lhs <= 0.015, designed.lhs, "lhs"});

  const auto short_dwell = design_step3_check(inputs, 5e-5, 1.0);
  out.push_back({"dwell condition fails at tau* = 1", !short_dwell.pass, short_dwell.lhs, "lhs"});

  auto ex = ex1::build(ex1::Example1Config{});
  auto loop0 = compose_closed_loop(ex.plant, ex.k0, 0);
  Step2Config cfg;
  cfg.sample_budget = 120;
  cfg.sim_horizon = 15.0;
  cfg.solver.dt = 2e-3;
  cfg.seed = opts.seed;
  const auto step2 = design_step2_check(
      loop0, [](std::span<const double> x) { return ex1::V0(x); },
      [](std::span<const double> x) { return ex1::V1(x, 0.25); }, ex1::gamma0, eps0a, 1.0 / 6.0,
      0.015, 1.0, cfg);
  out.push_back({"basin sampling (step 2) passes at eps0a = 4/27, eps1b = 0.015", step2.pass,
                 step2.worst_margin, "worst margin"});
  return out;
}

std::vector<CheckResult> suite_figA(const SuiteOptions&) {
  std::vector<CheckResult> out;
  auto run = run_preset("ex1-figA");
  const bool one_switch = run.census.count_1to0 == 1 && run.census.count_0to1 == 0;
  const double t_switch = run.census.events.empty() ? -1.0 : run.census.events.front().t;
  out.push_back({"exactly one 1->0 handoff", one_switch, double(run.census.events.size()), ""});
  out.push_back({"handoff time in [4.4, 4.8]", t_switch >= 4.4 && t_switch <= 4.8, t_switch,
                 "ln(100) = 4.6052 analytically"});
  const double dist = final_dist_A0(run);
  const double t_end = run.arc.last_sample().t;
  out.push_back({"|xi| <= 1e-2 by t = 15", dist <= 1e-2 && t_end <= 15.0, dist, ""});
  out.push_back({"terminates Converged", run.arc.termination == Termination::Converged,
                 double(run.arc.jump_count()), ""});
  out.push_back({"runtime < 1 s", run.wall_s < 1.0, run.wall_s, "seconds"});
  return out;
}

std::vector<CheckResult> suite_figB(const SuiteOptions&) {
  std::vector<CheckResult> out;
  auto run = run_preset("ex1-figB");
  const bool first_up = !run.census.events.empty() && run.census.events.front().from == 0 &&
                        run.census.events.front().t <= 1e-6;
  out.push_back({"immediate 0->1 escape", first_up,
                 run.census.events.empty() ? -1.0 : run.census.events.front().t, "first switch t"});
  out.push_back({"at least one 1->0 handoff", run.census.count_1to0 >= 1,
                 double(run.census.count_1to0), ""});
  out.push_back({"consecutive handoffs separated by >= tau* = 1 s",
                 run.census.min_dwell_t >= 1.0, run.census.min_dwell_t, "min dwell"});
  const int total = run.census.count_0to1 + run.census.count_1to0;
  out.push_back({"finitely many supervisor switches before capture",
                 run.arc.termination == Termination::Converged && total < 100, double(total), ""});
  out.push_back({"terminal |xi| <= 1e-2", final_dist_A0(run) <= 1e-2, final_dist_A0(run), ""});
  out.push_back({"runtime < 5 s", run.wall_s < 5.0, run.wall_s, "seconds"});
  return out;
}

std::vector<CheckResult> suite_figC(const SuiteOptions&) {
  std::vector<CheckResult> out;
  auto run = run_preset("ex1-figC");
  const int total = run.census.count_0to1 + run.census.count_1to0;
  out.push_back({"designed parameters give exactly one supervisor jump", total == 1,
                 double(total), ""});
  const double t_switch = run.census.events.empty() ? -1.0 : run.census.events.front().t;
  out.push_back({"handoff at the dwell expiry tau* = 15", std::abs(t_switch - 15.0) <= 1e-3,
                 t_switch, ""});
  out.push_back({"converges to the origin", run.arc.termination == Termination::Converged &&
                                                 final_dist_A0(run) <= 1e-2,
                 final_dist_A0(run), ""});
  out.push_back({"runtime < 2 s", run.wall_s < 2.0, run.wall_s, "seconds"});
  return out;
}

std::vector<CheckResult> suite_observer_bounds(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  std::vector<std::string> presets = {"ex1-figA", "ex1-figC"};
  if (!opts.preset.empty()) presets = {opts.preset};
  for (const auto& name : presets) {
    auto run = run_preset(name);
    auto ex = ex1::build(std::get<ex1::Example1Config>(run.built.scenario.config));
    const auto phases =
        check_phase_observer_bounds(run.arc, run.built.sup.layout, ex.obs0, ex.obs1);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : phases) worst = std::max(worst, p.max_violation);
    out.push_back({"estimator bound V_q <= z_q + beta_q along " + name + " (" +
                       std::to_string(phases.size()) + " phases)",
                   worst <= 1e-3, worst, "max violation"});
  }
  return out;
}

std::vector<CheckResult> suite_ex2_avoidance(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  std::vector<std::string> presets = {"ex2-below", "ex2-above"};
  if (!opts.preset.empty()) presets = {opts.preset};
  for (const auto& name : presets) {
    auto run = run_preset(name);
    const auto& lay = run.built.sup.layout;
    const auto& cfg = std::get<ex2::Example2Config>(run.built.scenario.config);

    double min_clear = std::numeric_limits<double>::infinity();
    double min_dist_A1 = min_clear;
    double xi2_at_crossing = std::numeric_limits<double>::quiet_NaN();
    double prev_x0 = -std::numeric_limits<double>::infinity();
    for (const auto& iv : run.arc.intervals) {
      for (const auto& s : iv.samples) {
        const double clear = std::hypot(s.x[0] - cfg.xi_bar[0], s.x[1] - cfg.xi_bar[1]);
        min_clear = std::min(min_clear, clear);
        min_dist_A1 = std::min(min_dist_A1, run.built.sup.dist_A1(lay.xi_of(s.x)));
        if (prev_x0 < 1.0 && s.x[0] >= 1.0 && std::isnan(xi2_at_crossing)) {
          xi2_at_crossing = s.x[1];
        }
        prev_x0 = s.x[0];
      }
    }
    out.push_back({name + ": obstacle clearance >= alpha_hat", min_clear >= cfg.alpha_hat,
                   min_clear, "min |xi - xi_bar|"});
    out.push_back({name + ": reaches |xi|_A1 <= 0.1", min_dist_A1 <= 0.1, min_dist_A1, ""});
    out.push_back({name + ": exactly one 1->0 handoff", run.census.count_1to0 == 1,
                   double(run.census.count_1to0), ""});
    out.push_back({name + ": converges |xi|_A0 <= 1e-2",
                   run.arc.termination == Termination::Converged && final_dist_A0(run) <= 1e-2,
                   final_dist_A0(run), ""});
    const bool below = name == "ex2-below";
    out.push_back({name + (below ? ": passes below (xi2 < 0 at xi1 = 1)"
                                 : ": passes above (xi2 > 0 at xi1 = 1)"),
                   below ? xi2_at_crossing < 0.0 : xi2_at_crossing > 0.0, xi2_at_crossing, ""});
    out.push_back({name + ": runtime < 5 s", run.wall_s < 5.0, run.wall_s, "seconds"});
  }
  return out;
}

std::vector<CheckResult> suite_ex2_decrease(const SuiteOptions&) {
  std::vector<CheckResult> out;

  // The hysteresis-switch probe plus both nominal routes.
  std::vector<std::pair<std::string, State>> starts = {
      {"ex2-below", {}}, {"ex2-above", {}}, {"ex2-below", {1.0, 0.8}}};
  double worst_jump_ratio = 0.0;
  int jumps_seen = 0;
  double worst_flow = -std::numeric_limits<double>::infinity();
  for (const auto& [preset, start] : starts) {
    auto sc = make_preset(preset);
    auto& cfg = std::get<ex2::Example2Config>(sc.config);
    if (!start.empty()) cfg.xi0 = start;
    auto built = build_scenario(sc);
    const auto arc = solve(built.sup.def, built.x0, built.solver);
    for (const auto& j : ex2::jump_decrease_report(arc, built.sup.layout, cfg)) {
      ++jumps_seen;
      worst_jump_ratio = std::max(worst_jump_ratio, j.phi_post / j.phi_pre);
    }
    worst_flow =
        std::max(worst_flow, ex2::flow_decrease_violation(arc, built.sup.layout, cfg));
  }
  const double gp = 1.0 / 1.01;  // (mu - lambda)^{-1} at the preset parameters
  out.push_back({"hysteresis jumps satisfy phi+ <= phi / (mu - lambda) (" +
                     std::to_string(jumps_seen) + " jumps)",
                 jumps_seen > 0 && worst_jump_ratio <= gp, worst_jump_ratio, "worst ratio"});
  out.push_back({"flow decrease d/dt phi <= -2 phi + 1e-6 along q = 1 flows",
                 worst_flow <= 1e-6, worst_flow,
                 "max d/dt phi + 2 phi; positive wherever the barrier deflects the route"});
  return out;
}

std::vector<CheckResult> suite_robustness(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  const std::vector<double> deltas = {0.0, 0.001, 0.005, 0.01};
  double envelope = 0.0;
  bool all_ok = true;
  std::string detail;
  for (double delta : deltas) {
    auto sc = make_preset("ex1-figA");
    sc.conv_tol = 0.0;  // fixed horizon; bounded noise keeps |xi| off zero
    const auto profile = ex1_noise_profile(delta, opts.seed + 1);
    auto built = build_scenario(sc, &profile);
    const auto arc = solve(built.sup.def, built.x0, built.solver);
    const double dist = built.sup.dist_A0(built.sup.layout.xi_of(arc.last_sample().x));
    envelope = std::max(envelope, dist);
    all_ok = all_ok && envelope <= 0.05;
    detail += (detail.empty() ? "" : ", ") + std::to_string(dist);
  }
  out.push_back({"terminal |xi| <= 0.05 under bounded noise, monotone envelope", all_ok,
                 envelope, "finals: " + detail});
  return out;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"solver-order", "ex1-certificates", "design",        "ex1-figA",
          "ex1-figB",     "ex1-figC",         "observer-bounds", "ex2-avoidance",
          "ex2-decrease", "robustness"};
}

std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opts) {
  if (suite == "solver-order") return suite_solver_order(opts);
  if (suite == "ex1-certificates") return suite_ex1_certificates(opts);
  if (suite == "design") return suite_design(opts);
  if (suite == "ex1-figA") return suite_figA(opts);
  if (suite == "ex1-figB") return suite_figB(opts);
  if (suite == "ex1-figC") return suite_figC(opts);
  if (suite == "observer-bounds") return suite_observer_bounds(opts);
  if (suite == "ex2-avoidance") return suite_ex2_avoidance(opts);
  if (suite == "ex2-decrease") return suite_ex2_decrease(opts);
  if (suite == "robustness") return suite_robustness(opts);
  throw InvalidConfig("unknown verification suite: " + suite);
}

std::vector<CheckResult> run_all(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  for (const auto& name : suite_names()) {
    auto rows = run_suite(name, opts);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace hysup::verify
