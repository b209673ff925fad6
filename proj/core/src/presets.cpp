#include "hysup/presets.hpp"

namespace hysup {

std::vector<std::string> preset_names() {
  return {"ex1-figA", "ex1-figB", "ex1-figC", "ex2-below", "ex2-above"};
}

Scenario make_preset(const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.solver.dt = 1e-3;
  sc.solver.guard_tol = 1e-8;

  if (name == "ex1-figA" || name == "ex1-figB" || name == "ex1-figC") {
    ex1::Example1Config cfg;
    cfg.alpha_bar = 0.25;
    cfg.sup.eps0a = 0.01;
    cfg.sup.eps1a = 0.01;
    cfg.sup.tau_star = 1.0;

    if (name == "ex1-figA") {
      cfg.xi0 = {3.0, -3.0};
      cfg.q0 = 1;
      cfg.z1_init = 1.0;
      sc.solver.max_t = 15.0;
    } else if (name == "ex1-figB") {
      cfg.xi0 = {30.0, -30.0};
      cfg.q0 = 0;
      // The supervisor holds z1 at zero while q = 0; starting the estimator
      // at zero puts the initial condition inside the flow set, from where
      // the local observer races past eps0a and forces the 0 -> 1 handoff.
      cfg.z1_init = 0.0;
      sc.solver.max_t = 30.0;
    } else {
      cfg.sup.eps0a = 4.0 / 27.0;
      cfg.sup.eps1a = 5e-5;
      cfg.sup.tau_star = 15.0;
      cfg.xi0 = {3.0, -3.0};
      cfg.q0 = 1;
      cfg.z1_init = 1.0;
      sc.solver.max_t = 30.0;
    }
    sc.config = cfg;
    return sc;
  }

  if (name == "ex2-below" || name == "ex2-above") {
    ex2::Example2Config cfg;
    cfg.sup.eps0a = 0.01;
    cfg.sup.eps1a = 0.01;
    cfg.sup.tau_star = 1.0;
    cfg.zeta1_0 = name == "ex2-below" ? 1 : 2;
    sc.solver.max_t = 1500.0;
    // The hysteresis jump set touches the flow set on the potential-equality
    // ridge; flow priority resolves the overlap as a continuous solution.
    sc.solver.jump_priority = JumpPriority::FlowFirst;
    sc.config = cfg;
    return sc;
  }

  throw InvalidConfig("unknown preset: " + name);
}

BuiltScenario build_scenario(const Scenario& scenario, const DisturbanceProfile* profile) {
  BuiltScenario built;
  built.scenario = scenario;
  built.solver = scenario.solver;
  const bool disturbed = profile != nullptr && !profile->all_zero();

  auto assemble = [&](auto ex) {
    if (!disturbed) {
      built.sup = std::move(ex.sup);
      built.x0 = ex.initial_state();
      return;
    }
    const Plant wrapped = perturb_plant(ex.plant, *profile);
    built.sup = build_supervised_system(wrapped, ex.k0, ex.k1, ex.obs0, ex.obs1, ex.config.sup);
    State x0 = ex.initial_state();
    // The wrapped plant appends a clock after the xi block.
    x0.insert(x0.begin() + ex.sup.layout.n_p, 0.0);
    built.x0 = std::move(x0);
  };

  if (scenario.is_ex1()) {
    assemble(ex1::build(std::get<ex1::Example1Config>(scenario.config)));
  } else {
    assemble(ex2::build(std::get<ex2::Example2Config>(scenario.config)));
  }

  if (scenario.conv_tol > 0.0) {
    built.solver.converged = make_convergence_monitor(built.sup, scenario.conv_tol);
    built.solver.converge_hold = 1.0;
  }
  return built;
}

DisturbanceProfile ex1_noise_profile(double delta, std::uint64_t seed) {
  DisturbanceProfile profile;
  auto channel = [&](int dim, std::uint64_t salt) {
    DisturbanceChannel ch;
    ch.kind = delta > 0.0 ? DisturbanceChannel::Kind::Noise : DisturbanceChannel::Kind::Zero;
    ch.dim = dim;
    ch.bound = delta;
    ch.grid_dt = 0.01;
    ch.seed = seed ^ salt;
    return ch;
  };
  profile.d1 = channel(2, 0x1111);
  profile.d2 = channel(2, 0x2222);
  profile.d3 = channel(1, 0x3333);
  profile.d4 = channel(1, 0x4444);
  return profile;
}

}  // namespace hysup
