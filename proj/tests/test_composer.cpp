#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hysup/composer.hpp"
#include "hysup/example1.hpp"
#include "hysup/example2.hpp"
#include "hysup/solver.hpp"

using namespace hysup;

TEST_CASE("local closed loop matches the hand-derived field") {
  // u = (0, -alpha_bar) cancels the drift: xi' = (-xi1 - xi2 xi1^2, -xi2 + xi1^2).
  auto ex = ex1::build(ex1::Example1Config{});
  auto loop = compose_closed_loop(ex.plant, ex.k0, 0);
  CHECK(loop.dim == 2);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  State dx(2);
  for (int i = 0; i < 1000; ++i) {
    const State xi = {box(rng), box(rng)};
    loop.flow_map(xi, dx);
    const State ref = ex1::f_loop0(xi);
    CHECK(dx[0] == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(ref[1]).epsilon(1e-12));
  }
  // A static controller composes with full flow freedom and no jumps.
  CHECK(loop.flow_guard(State{0.0, 0.0}) > 0.0);
  CHECK(loop.jump_guard(State{0.0, 0.0}) < 0.0);
}

TEST_CASE("global closed loop matches the hand-derived field") {
  // u = (xi2, 0): xi' = (-xi1, -xi2 + xi1^2 + alpha_bar).
  auto ex = ex1::build(ex1::Example1Config{});
  auto loop = compose_closed_loop(ex.plant, ex.k1, 1);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  State dx(2);
  for (int i = 0; i < 1000; ++i) {
    const State xi = {box(rng), box(rng)};
    loop.flow_map(xi, dx);
    const State ref = ex1::f_loop1(xi, ex.config.alpha_bar);
    CHECK(dx[0] == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(ref[1]).epsilon(1e-12));
  }
}

TEST_CASE("zero plant with a static controller gives a zero field") {
  Plant plant;
  plant.n_p = 2;
  plant.m_p = 1;
  plant.f_p = [](std::span<const double>, std::span<const double>, std::span<double> dxi) {
    dxi[0] = 0.0;
    dxi[1] = 0.0;
  };
  plant.outputs.push_back({1, [](std::span<const double> xi) { return State{xi[0]}; }});

  HybridController ctrl;
  ctrl.n_c = 0;
  ctrl.m_c = 1;
  ctrl.kappa = [](std::span<const double>, std::span<const double>) { return State{0.0}; };

  auto loop = compose_closed_loop(plant, ctrl, 0);
  State dx(2);
  loop.flow_map(State{1.0, -2.0}, dx);
  CHECK(dx[0] == 0.0);
  CHECK(dx[1] == 0.0);
}

TEST_CASE("evaluate_controller reproduces the worked values") {
  auto ex = ex1::build(ex1::Example1Config{});

  SUBCASE("local control is the constant (0, -alpha_bar)") {
    const State u = evaluate_controller(ex.k0, State{123.0}, {});
    CHECK(u[0] == 0.0);
    CHECK(u[1] == -0.25);
  }
  SUBCASE("global control at xi = (3, -3)") {
    const State y = ex.plant.outputs[1].h(State{3.0, -3.0});
    CHECK(y[0] == doctest::Approx(-3.25));
    const State u = evaluate_controller(ex.k1, y, {});
    CHECK(u[0] == doctest::Approx(-3.0));
    CHECK(u[1] == 0.0);
  }
  SUBCASE("point-mass local control vanishes at the target") {
    auto ex2b = ex2::build(ex2::Example2Config{});
    const State u = evaluate_controller(ex2b.k0, State{4.0, -0.25}, State{0.0});
    CHECK(u[0] == doctest::Approx(0.0));
    CHECK(u[1] == doctest::Approx(0.0));
  }
  SUBCASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(evaluate_controller(ex.k0, State{1.0, 2.0}, {}), DimensionMismatch);
    CHECK_THROWS_AS(compose_closed_loop(ex.plant, ex.k0, 5), DimensionMismatch);
  }
}

TEST_CASE("the plant component never jumps in a composed loop") {
  auto ex = ex2::build(ex2::Example2Config{});
  // Unpadded hysteresis controller composed alone.
  auto loop = compose_closed_loop(ex.plant, ex.k1, 1);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> box(-2.0, 5.0);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const State x = {box(rng), box(rng), rng() % 2 ? 1.0 : 2.0};
    if (loop.jump_guard(x) < 0.0) continue;
    ++hits;
    for (const auto& g : loop.jump_map(x)) {
      REQUIRE(g.size() == 3);
      CHECK(g[0] == x[0]);
      CHECK(g[1] == x[1]);
    }
  }
  CHECK(hits > 10);  // the sweep must actually reach the jump set
}

TEST_CASE("pad_controller embeds a controller into a larger state") {
  auto ex = ex1::build(ex1::Example1Config{});
  auto padded = pad_controller(ex.k0, 2);
  CHECK(padded.n_c == 2);

  const State zeta = {0.0, 0.0};
  const State u = padded.kappa(State{1.0}, zeta);
  CHECK(u[1] == -0.25);

  State dz(2, 99.0);
  padded.f_c(State{1.0}, zeta, dz);
  CHECK(dz[0] == 0.0);
  CHECK(dz[1] == 0.0);

  CHECK(padded.phi_rep == State{0.0, 0.0});
  CHECK(padded.phi_guard(State{0.0, 0.0}) > 0.0);
  CHECK(padded.phi_guard(State{0.0, 3.0}) < 0.0);
}
