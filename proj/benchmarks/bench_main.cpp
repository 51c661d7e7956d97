#include <benchmark/benchmark.h>

#include <random>

#include "scclab/fuchsian.hpp"
#include "scclab/hyperbolic.hpp"
#include "scclab/nets.hpp"
#include "scclab/walk.hpp"

using namespace scclab;

static void BM_Distance(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(-5, 5), y(0.01, 10);
  std::vector<HalfPlanePoint> pts(1024);
  for (auto& p : pts) p = {x(rng), y(rng)};
  std::size_t i = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(distance(pts[i & 1023], pts[(i + 7) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Distance);

static void BM_ModularOrbit(benchmark::State& st) {
  auto G = modular_group();
  const double R = static_cast<double>(st.range(0));
  for (auto _ : st) {
    auto orbit = enumerate_orbit(G, {0, 2}, R);
    benchmark::DoNotOptimize(orbit.records.size());
  }
}
BENCHMARK(BM_ModularOrbit)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_BuildBallNet(benchmark::State& st) {
  BallRegion region({0, 1}, static_cast<double>(st.range(0)));
  for (auto _ : st) {
    auto net = build_net(region, 1.0, 3);
    benchmark::DoNotOptimize(net.size());
  }
}
BENCHMARK(BM_BuildBallNet)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_NetCount(benchmark::State& st) {
  BallRegion region({0, 1}, 7);
  auto net = build_net(region, 1.0, 3);
  for (auto _ : st) benchmark::DoNotOptimize(net.count({0, 1}, 5));
}
BENCHMARK(BM_NetCount);

static void BM_EquivariantStep(benchmark::State& st) {
  EquivariantNet net(genus2_surface_group(), 0.5, 5.0);
  std::mt19937_64 rng(9);
  auto s = net.start();
  for (auto _ : st) {
    s = net.step(s, rng);
    benchmark::DoNotOptimize(s.z);
  }
}
BENCHMARK(BM_EquivariantStep);
BENCHMARK_MAIN();
