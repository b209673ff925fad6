#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hysup/perturb.hpp"
#include "hysup/presets.hpp"
#include "hysup/solver.hpp"

using namespace hysup;

namespace {

HybridSystemDef unit_timer() {
  HybridSystemDef sys;
  sys.dim = 1;
  sys.flow_map = [](std::span<const double>, std::span<double> dx) { dx[0] = 1.0; };
  sys.flow_guard = [](std::span<const double> x) { return 1.0 - x[0]; };
  sys.jump_guard = [](std::span<const double> x) { return x[0] - 1.0; };
  sys.jump_map = [](std::span<const double>) { return std::vector<State>{{0.0}}; };
  return sys;
}

}  // namespace

TEST_CASE("zero profile reproduces the nominal arc bit-identically") {
  auto nominal = build_scenario(make_preset("ex1-figA"));
  const DisturbanceProfile zero;
  auto wrapped = build_scenario(make_preset("ex1-figA"), &zero);
  CHECK(wrapped.sup.def.dim == nominal.sup.def.dim);  // no clock appended

  const auto a = solve(nominal.sup.def, nominal.x0, nominal.solver);
  const auto b = solve(wrapped.sup.def, wrapped.x0, wrapped.solver);
  REQUIRE(a.intervals.size() == b.intervals.size());
  for (std::size_t k = 0; k < a.intervals.size(); ++k) {
    REQUIRE(a.intervals[k].samples.size() == b.intervals[k].samples.size());
    for (std::size_t s = 0; s < a.intervals[k].samples.size(); ++s) {
      CHECK(a.intervals[k].samples[s].x == b.intervals[k].samples[s].x);
    }
  }
}

TEST_CASE("constant state drift integrates to c * t") {
  Plant plant;
  plant.n_p = 2;
  plant.m_p = 1;
  plant.f_p = [](std::span<const double>, std::span<const double>, std::span<double> dxi) {
    dxi[0] = 0.0;
    dxi[1] = 0.0;
  };
  plant.outputs.push_back({1, [](std::span<const double> xi) { return State{xi[0]}; }});
  plant.outputs.push_back({1, [](std::span<const double> xi) { return State{xi[1]}; }});

  DisturbanceProfile profile;
  profile.d2.kind = DisturbanceChannel::Kind::Constant;
  profile.d2.dim = 2;
  profile.d2.bound = 0.5;
  profile.d2.constant = {0.5, 0.0};

  const Plant wrapped = perturb_plant(plant, profile);
  CHECK(wrapped.n_p == 3);

  HybridSystemDef sys;
  sys.dim = 3;
  sys.flow_map = [wrapped](std::span<const double> x, std::span<double> dx) {
    wrapped.f_p(x, State{0.0}, dx);
  };
  sys.flow_guard = [](std::span<const double>) { return 1.0; };
  sys.jump_guard = [](std::span<const double>) { return -1.0; };
  sys.jump_map = [](std::span<const double>) { return std::vector<State>{}; };

  SolverConfig cfg;
  cfg.max_t = 4.0;
  const auto arc = solve(sys, {1.0, 2.0, 0.0}, cfg);
  CHECK(arc.last_sample().x[0] == doctest::Approx(1.0 + 0.5 * 4.0).epsilon(1e-10));
  CHECK(arc.last_sample().x[1] == 2.0);
  CHECK(arc.last_sample().x[2] == doctest::Approx(4.0));  // the appended clock
}

TEST_CASE("noise channels respect their bound and reproduce by seed") {
  DisturbanceChannel ch;
  ch.kind = DisturbanceChannel::Kind::Noise;
  ch.dim = 3;
  ch.bound = 0.02;
  ch.grid_dt = 0.05;
  ch.seed = 99;

  DisturbanceChannel same = ch;
  double max_abs = 0.0;
  for (double t = 0.0; t < 20.0; t += 0.013) {
    const State a = ch.eval(t);
    const State b = same.eval(t);
    CHECK(a == b);
    for (double v : a) max_abs = std::max(max_abs, std::abs(v));
  }
  CHECK(max_abs <= 0.02);
  CHECK(max_abs > 0.005);  // noise is actually present

  // Piecewise-constant on the grid.
  CHECK(ch.eval(0.101) == ch.eval(0.149));
  CHECK(ch.eval(0.101) != ch.eval(0.151));
}

TEST_CASE("guard inflation") {
  auto sys = unit_timer();

  SUBCASE("delta = 0 leaves the guards untouched") {
    auto same = inflate_system(sys, 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (int i = 0; i < 10000; ++i) {
      const State x = {box(rng)};
      CHECK(same.flow_guard(x) == sys.flow_guard(x));
      CHECK(same.jump_guard(x) == sys.jump_guard(x));
    }
  }
  SUBCASE("a unit-slope guard inflates exactly") {
    auto fat = inflate_system(sys, 0.1);
    CHECK(fat.jump_guard(State{0.9}) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(fat.jump_guard(State{0.89}) < 0.0);
    CHECK(sys.jump_guard(State{0.9}) == doctest::Approx(-0.1));
  }
  SUBCASE("inflation is monotone in delta") {
    auto small = inflate_system(sys, 0.05);
    auto large = inflate_system(sys, 0.2);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
      const State x = {box(rng)};
      CHECK(small.jump_guard(x) <= large.jump_guard(x));
      CHECK(small.flow_guard(x) <= large.flow_guard(x));
      CHECK(sys.jump_guard(x) <= small.jump_guard(x));
    }
  }
  SUBCASE("jump offsets are injectable") {
    InflateConfig icfg;
    icfg.jump_offset = [](std::span<const double>) { return State{0.25}; };
    auto off = inflate_system(sys, 0.0, icfg);
    CHECK(off.jump_map(State{1.0})[0][0] == 0.25);
  }
  SUBCASE("the inflated supervised loop still converges practically") {
    auto built = build_scenario(make_preset("ex1-figA"));
    InflateConfig icfg;
    icfg.samples = 2000;
    auto fat = inflate_system(built.sup.def, 0.01, icfg);
    const auto arc = solve(fat, built.x0, built.solver);
    CHECK((arc.termination == Termination::Converged ||
           arc.termination == Termination::HorizonT));
    const double dist = built.sup.dist_A0(built.sup.layout.xi_of(arc.last_sample().x));
    CHECK(dist <= 0.05);
  }
}

TEST_CASE("bounded noise keeps the supervised run practically convergent") {
  const auto profile = ex1_noise_profile(0.01, 42);
  auto sc = make_preset("ex1-figA");
  sc.conv_tol = 0.0;  // run the full horizon; noise keeps |xi| off exact zero
  auto built = build_scenario(sc, &profile);
  CHECK(built.sup.def.dim == 7);  // clock appended after the plant block

  const auto arc = solve(built.sup.def, built.x0, built.solver);
  CHECK(arc.termination == Termination::HorizonT);
  const auto census = switching_census(arc, built.sup.layout);
  CHECK(census.count_1to0 == 1);
  const double final_dist = built.sup.dist_A0(built.sup.layout.xi_of(arc.last_sample().x));
  CHECK(final_dist <= 0.05);
}
