#include <benchmark/benchmark.h>

#include "glplan/geometry.hpp"
#include "glplan/random.hpp"

namespace {

using namespace glplan;

ChainSpec bench_chain() {
  return ChainSpec::with_links({2.0, 1.5, 2.0, 1.0, 1.5, 1.0, 2.0, 1.5});
}

std::vector<Circle> bench_world(int circles) {
  RandomStream rng(7);
  std::vector<Circle> w;
  for (int i = 0; i < circles; ++i) {
    w.push_back({rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(1, 2)});
  }
  return w;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const ChainSpec chain = bench_chain();
  RandomStream rng(1);
  Configuration q;
  for (const auto& l : chain.joint_limits) q.angles.push_back(rng.uniform(l.lo, l.hi));
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_kinematics(chain, q));
  }
}
BENCHMARK(BM_ForwardKinematics);

void BM_ConfigValid(benchmark::State& state) {
  const ChainSpec chain = bench_chain();
  const std::vector<Circle> world = bench_world(static_cast<int>(state.range(0)));
  RandomStream rng(2);
  for (auto _ : state) {
    Configuration q;
    for (const auto& l : chain.joint_limits) q.angles.push_back(rng.uniform(l.lo, l.hi));
    benchmark::DoNotOptimize(config_valid(chain, q, world));
  }
}
BENCHMARK(BM_ConfigValid)->Arg(2)->Arg(7)->Arg(15);

void BM_MotionValid(benchmark::State& state) {
  const ChainSpec chain = bench_chain();
  const std::vector<Circle> world = bench_world(7);
  RandomStream rng(3);
  for (auto _ : state) {
    Configuration a, b;
    for (const auto& l : chain.joint_limits) {
      a.angles.push_back(rng.uniform(l.lo, l.hi));
      b.angles.push_back(rng.uniform(l.lo, l.hi));
    }
    benchmark::DoNotOptimize(motion_valid(chain, a, b, world));
  }
}
BENCHMARK(BM_MotionValid);

}  // namespace
