#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hysup/example1.hpp"
#include "hysup/example2.hpp"
#include "hysup/presets.hpp"
#include "hysup/solver.hpp"

using namespace hysup;

TEST_CASE("plant field of the limited-information example") {
  const double a = 0.25;
  SUBCASE("the local equilibrium is the origin") {
    const State dx = ex1::plant_dynamics(State{0.0, 0.0}, State{0.0, -a}, a);
    CHECK(dx[0] == 0.0);
    CHECK(dx[1] == 0.0);
  }
  SUBCASE("the global equilibrium is (0, alpha_bar)") {
    const State dx = ex1::plant_dynamics(State{0.0, a}, State{a, 0.0}, a);
    CHECK(dx[0] == 0.0);
    CHECK(dx[1] == 0.0);
  }
  SUBCASE("hand-evaluated point") {
    const State dx = ex1::plant_dynamics(State{1.0, 1.0}, State{0.0, 0.0}, a);
    CHECK(dx[0] == doctest::Approx(-2.0));
    CHECK(dx[1] == doctest::Approx(0.25));
  }
}

TEST_CASE("example-1 configuration validation") {
  ex1::Example1Config cfg;
  cfg.alpha_bar = 0.7;  // above sqrt(3)/3
  CHECK_THROWS_AS(ex1::build(cfg), InvalidConfig);
  cfg.alpha_bar = 0.0;
  CHECK_THROWS_AS(ex1::build(cfg), InvalidConfig);
  cfg.alpha_bar = 0.25;
  CHECK_NOTHROW(ex1::build(cfg));
}

TEST_CASE("example-1 certificates hold on a sampled box") {
  const double a = 0.25;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  double worst0 = -1e300, worst1 = -1e300;
  for (int i = 0; i < 20000; ++i) {
    const State xi = {box(rng), box(rng)};
    const State f0 = ex1::f_loop0(xi);
    const State g0 = ex1::grad_V0(xi);
    worst0 = std::max(worst0, g0[0] * f0[0] + g0[1] * f0[1] + ex1::V0(xi) -
                                  ex1::gamma0(std::abs(xi[0])));
    const State f1 = ex1::f_loop1(xi, a);
    const State g1 = ex1::grad_V1(xi, a);
    worst1 = std::max(worst1, g1[0] * f1[0] + g1[1] * f1[1] + ex1::V1(xi, a));
  }
  CHECK(worst0 <= 1e-9);
  CHECK(worst1 <= 1e-9);
}

TEST_CASE("the handoff target lies strictly inside the local basin") {
  CHECK(ex1::V0(State{0.0, 0.25}) == doctest::Approx(0.03125));
  CHECK(ex1::V0(State{0.0, 0.25}) < 1.0 / 6.0);
}

TEST_CASE("barrier function") {
  CHECK(ex2::barrier(1.0) == 0.0);
  CHECK(ex2::barrier(2.0) == 0.0);
  CHECK(ex2::barrier(0.5) == doctest::Approx(0.25 * std::log(2.0)));
  CHECK_THROWS_AS(ex2::barrier(0.0), DomainError);
  CHECK_THROWS_AS(ex2::barrier(-1.0), DomainError);
  CHECK(ex2::barrier_deriv(1.0) == 0.0);

  SUBCASE("derivative agrees with central differences") {
    const double h = 1e-4;
    for (double z : {0.3, 0.9, 1.0, 1.5}) {
      const double fd = (ex2::barrier(z + h) - ex2::barrier(z - h)) / (2.0 * h);
      CHECK(std::abs(ex2::barrier_deriv(z) - fd) <= 1e-5);
    }
  }
}

TEST_CASE("route potentials") {
  ex2::Example2Config cfg;

  SUBCASE("both potentials vanish at the intermediate target") {
    for (int route : {1, 2}) {
      CHECK(ex2::clearance(cfg.xi_circ, route, cfg) >= 1.0);
      CHECK(ex2::potential(cfg.xi_circ, route, cfg) == doctest::Approx(0.0));
    }
  }
  SUBCASE("the barrier is inactive far from the obstacle") {
    const State xi = {-2.0, 3.0};
    for (int route : {1, 2}) {
      REQUIRE(ex2::clearance(xi, route, cfg) >= 1.0);
      const double quad = 0.5 * (std::pow(xi[0] - 3.0, 2) + std::pow(xi[1], 2));
      CHECK(ex2::potential(xi, route, cfg) == doctest::Approx(quad));
    }
  }
  SUBCASE("the keep-out set raises DomainError") {
    CHECK_THROWS_AS(ex2::potential(State{1.0, 0.3}, 1, cfg), DomainError);
    CHECK_THROWS_AS(ex2::potential_grad(State{1.0, 0.3}, 1, cfg), DomainError);
    CHECK_NOTHROW(ex2::potential_safe(State{1.0, 0.3}, 1, cfg));
  }
  SUBCASE("analytic gradients match central differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> bx(-1.5, 4.5), by(-3.0, 3.0);
    const double h = 1e-6;
    int accepted = 0;
    while (accepted < 100) {
      const State xi = {bx(rng), by(rng)};
      const int route = 1 + static_cast<int>(rng() % 2);
      const double d = ex2::clearance(xi, route, cfg);
      if (d <= 0.2 || d >= 3.0) continue;
      ++accepted;
      const State g = ex2::potential_grad(xi, route, cfg);
      for (int i = 0; i < 2; ++i) {
        State lo = xi, hi = xi;
        lo[i] -= h;
        hi[i] += h;
        const double fd =
            (ex2::potential(hi, route, cfg) - ex2::potential(lo, route, cfg)) / (2.0 * h);
        CHECK(std::abs(g[i] - fd) <= 1e-5);
      }
    }
  }
}

TEST_CASE("hysteresis jump map") {
  ex2::Example2Config cfg;

  SUBCASE("a dominated route switches") {
    // Near the upper keep-out ball the active route-1 potential exceeds the
    // alternative by more than mu - lambda.
    const State xi = {1.0, 0.75};
    const double phi1 = ex2::potential_safe(xi, 1, cfg);
    const double phi2 = ex2::potential_safe(xi, 2, cfg);
    REQUIRE(phi1 >= (cfg.mu - cfg.lambda) * phi2);
    const auto next = ex2::hysteresis_jump(xi, 1, cfg);
    REQUIRE(next.size() == 1);
    CHECK(next[0] == 2);
  }
  SUBCASE("ties keep the current route first") {
    const auto from1 = ex2::hysteresis_jump(cfg.xi_circ, 1, cfg);
    REQUIRE(from1.size() == 2);
    CHECK(from1[0] == 1);
    const auto from2 = ex2::hysteresis_jump(cfg.xi_circ, 2, cfg);
    CHECK(from2[0] == 2);
  }
  SUBCASE("every successor satisfies the hysteresis decrease") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> bx(-1.0, 4.0), by(-2.0, 2.0);
    const double gp = 1.0 / (cfg.mu - cfg.lambda);
    int fired = 0;
    for (int i = 0; i < 5000; ++i) {
      const State xi = {bx(rng), by(rng)};
      const int zeta = 1 + static_cast<int>(rng() % 2);
      const double active = ex2::potential_safe(xi, zeta, cfg);
      const double other = ex2::potential_safe(xi, zeta == 1 ? 2 : 1, cfg);
      if (active < (cfg.mu - cfg.lambda) * std::min(active, other)) continue;
      ++fired;
      for (int next : ex2::hysteresis_jump(xi, zeta, cfg)) {
        const double phi_next = ex2::potential_safe(xi, next, cfg);
        CHECK(phi_next <= gp * active + 1e-12);
      }
    }
    CHECK(fired > 50);
  }
}

TEST_CASE("example-2 configuration validation") {
  ex2::Example2Config cfg;
  cfg.lambda = 0.2;  // >= mu - 1 = 0.1
  CHECK_THROWS_AS(ex2::build(cfg), InvalidConfig);
  cfg.lambda = 0.09;
  cfg.mu = 0.9;
  CHECK_THROWS_AS(ex2::build(cfg), InvalidConfig);
  cfg = ex2::Example2Config{};
  CHECK_NOTHROW(ex2::build(cfg));
}

TEST_CASE("example-2 assembled data") {
  auto ex = ex2::build(ex2::Example2Config{});
  CHECK(ex.sup.dist_A0(State{4.0, -0.25}) == doctest::Approx(0.0));
  CHECK(ex.sup.dist_A1(State{3.0, 0.0}) == doctest::Approx(0.0));
  // gamma' = (mu - lambda)^{-1} = 1/1.01, eps1 = 1 - gamma'.
  CHECK(ex.obs1.eps == doctest::Approx(1.0 - 1.0 / 1.01).epsilon(1e-12));
  CHECK(ex.sup.layout.dim() == 8);

  // Printed audit regions: the start point lies in neither.
  CHECK_FALSE(ex2::in_region_O1(State{0.0, 0.0}));
  CHECK_FALSE(ex2::in_region_O2(State{0.0, 0.0}));
  CHECK(ex2::in_region_O1(State{3.0, 0.5}));
  CHECK(ex2::in_region_O2(State{0.5, 2.0}));
}

TEST_CASE("a dominated start switches route once and still converges") {
  auto sc = make_preset("ex2-below");
  auto& cfg = std::get<ex2::Example2Config>(sc.config);
  cfg.xi0 = {1.0, 0.8};  // deep in route-2 territory with zeta1 = 1
  auto built = build_scenario(sc);
  const auto arc = solve(built.sup.def, built.x0, built.solver);
  CHECK(arc.termination == Termination::Converged);

  const auto jumps = ex2::jump_decrease_report(arc, built.sup.layout, cfg);
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].zeta_from == 1);
  CHECK(jumps[0].zeta_to == 2);
  CHECK(jumps[0].phi_post <= jumps[0].phi_pre / (cfg.mu - cfg.lambda));

  const auto census = switching_census(arc, built.sup.layout);
  CHECK(census.count_1to0 == 1);
  CHECK(built.sup.dist_A0(built.sup.layout.xi_of(arc.last_sample().x)) <= 1e-2);
}
