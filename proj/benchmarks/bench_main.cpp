#include <benchmark/benchmark.h>

#include "obdeg/continuation.hpp"
#include "obdeg/degree.hpp"
#include "obdeg/linops.hpp"
#include "obdeg/reflector.hpp"
#include "obdeg/registry.hpp"

using namespace obdeg;

namespace {

void BM_BuildOperators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const DomainPtr d = build_disk(n, 2 * n, 1.0);
    benchmark::DoNotOptimize(&d->operators());
  }
}
BENCHMARK(BM_BuildOperators)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DomainPtr d = build_disk(n, 2 * n, 1.0);
  const ObliqueProblem prob = semilinear_robin_problem(d);
  const ScalarField u = ScalarField::sample(d, [](const Vec2& x) { return 0.2 * x.x(); });
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(prob, u));
}
BENCHMARK(BM_Jacobian)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NewtonSemilinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DomainPtr d = build_disk(n, 2 * n, 1.0);
  const ObliqueProblem prob = semilinear_robin_problem(d);
  const ScalarField u0 = ScalarField::sample(d, [](const Vec2&) { return 0.8; });
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(prob, u0));
}
BENCHMARK(BM_NewtonSemilinear)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DegreeLinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearPair pair = laplace_robin_pair(build_disk(n, 2 * n, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(degree_linear(pair));
}
BENCHMARK(BM_DegreeLinear)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_AssembleLN(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DomainPtr d = build_disk(n, 2 * n, 1.0);
  const std::vector<Mat2> a(d->node_count(), Mat2::Identity());
  const std::vector<Vec2> b(d->gamma().begin(), d->gamma().end());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_LN(d, a, b, 8.0));
}
BENCHMARK(BM_AssembleLN)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ReflectorExample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DomainPtr d = build_star(RadiusFunction(0.5, {0.0, 0.03}), n, 2 * n);
  const ReflectorProblem p = manufacture(d, example_reflector_solution(), example_target_intensity());
  const DomainFoliation fol(RadiusFunction::constant(0.45), d->radius(), n, 2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_reflector(p, fol, {1e-1, 1e-2}));
}
BENCHMARK(BM_ReflectorExample)->Arg(16)->Arg(24)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
