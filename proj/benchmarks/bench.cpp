#include <benchmark/benchmark.h>

#include "flatdyn/cf.hpp"
#include "flatdyn/connections.hpp"

using namespace flatdyn;

static void BM_EnumerateTorus(benchmark::State& state) {
  auto X = build_surface<Rational>(Permutation({2, 1}),
                                   {Rational(7, 3), Rational(5, 2)},
                                   {Rational(3, 4), Rational(-3, 4)});
  Rational L(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_connections(X, L));
}
BENCHMARK(BM_EnumerateTorus)->Arg(5)->Arg(10)->Arg(20);

static void BM_EnumerateGenus2(benchmark::State& state) {
  auto X = build_surface<Rational>(
      Permutation({4, 3, 2, 1}),
      {Rational(17, 5), Rational(23, 7), Rational(9, 4), Rational(31, 8)},
      {Rational(1), Rational(1, 2), Rational(-3, 5), Rational(-6, 7)});
  Rational L(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_connections(X, L));
}
BENCHMARK(BM_EnumerateGenus2)->Arg(6)->Arg(12);

static void BM_IetOrbit(benchmark::State& state) {
  Iet<Rational> T(Permutation({3, 1, 2}),
                  {Rational(13, 6), Rational(11, 7), Rational(23, 9)});
  for (auto _ : state)
    benchmark::DoNotOptimize(T.iterate(T.ub(2), state.range(0)));
}
BENCHMARK(BM_IetOrbit)->Arg(100)->Arg(1000);

static void BM_CfExpand(benchmark::State& state) {
  Rational alpha(1234577, 987654);
  for (auto _ : state)
    benchmark::DoNotOptimize(cf_expand(alpha, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CfExpand)->Arg(10)->Arg(40);

BENCHMARK_MAIN();
