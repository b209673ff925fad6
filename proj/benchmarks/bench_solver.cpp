#include <benchmark/benchmark.h>

#include "hysup/example2.hpp"
#include "hysup/presets.hpp"
#include "hysup/solver.hpp"

using namespace hysup;

namespace {

void BM_rk4_step_supervised(benchmark::State& state) {
  auto built = build_scenario(make_preset("ex1-figA"));
  State out(built.x0.size());
  for (auto _ : state) {
    rk4_step(built.sup.def, built.x0, 1e-3, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_rk4_step_supervised);

void BM_guard_eval_supervised(benchmark::State& state) {
  auto built = build_scenario(make_preset("ex1-figA"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(built.sup.def.flow_guard(built.x0));
    benchmark::DoNotOptimize(built.sup.def.jump_guard(built.x0));
  }
}
BENCHMARK(BM_guard_eval_supervised);

void BM_solve_figA(benchmark::State& state) {
  auto built = build_scenario(make_preset("ex1-figA"));
  for (auto _ : state) {
    auto arc = solve(built.sup.def, built.x0, built.solver);
    benchmark::DoNotOptimize(arc.sample_count());
  }
}
BENCHMARK(BM_solve_figA)->Unit(benchmark::kMillisecond);

void BM_route_potential(benchmark::State& state) {
  ex2::Example2Config cfg;
  const State xi = {0.7, -0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ex2::potential_safe(xi, 1, cfg));
    auto g = ex2::potential_grad_safe(xi, 1, cfg);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_route_potential);

}  // namespace

BENCHMARK_MAIN();
