#include <benchmark/benchmark.h>

#include "glplan/database.hpp"
#include "glplan/sampling.hpp"

namespace {

using namespace glplan;

GmmSampler make_gmm(int mixtures, std::size_t dof) {
  RandomStream rng(11);
  std::vector<Mixture> mix;
  for (int i = 0; i < mixtures; ++i) {
    Configuration mean;
    for (std::size_t j = 0; j < dof; ++j) mean.angles.push_back(rng.uniform(-kPi, kPi));
    mix.push_back(Mixture::with_sigma(mean, 0.1));
  }
  return GmmSampler::equal_weights(mix);
}

void BM_GmmSample(benchmark::State& state) {
  const GmmSampler g = make_gmm(static_cast<int>(state.range(0)), 8);
  const std::vector<JointLimits> limits(8, JointLimits{});
  RandomStream rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.sample(limits, rng));
  }
}
BENCHMARK(BM_GmmSample)->Arg(1)->Arg(23)->Arg(128);

void BM_GlSample(benchmark::State& state) {
  const std::vector<JointLimits> limits(8, JointLimits{});
  const GlSampler gl(synthesize({make_gmm(23, 8), make_gmm(12, 8)}), 0.5, limits);
  RandomStream rng(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gl.sample(rng));
  }
}
BENCHMARK(BM_GlSample);

void BM_Retrieve(benchmark::State& state) {
  // Database lookup cost across entry counts.
  const int entries = static_cast<int>(state.range(0));
  ExperienceDatabase db(8);
  RandomStream rng(9);
  for (int i = 0; i < entries; ++i) {
    const double da = rng.uniform(2.0, 8.0);
    DatabaseEntry entry{{da, 0.0, rng.uniform(1.0, 2.0), da + rng.uniform(2.0, 4.0),
                         rng.uniform(-2.0, 2.0), rng.uniform(1.0, 2.0)},
                        make_gmm(8, 8),
                        {}};
    db.insert(std::move(entry));
  }
  const LocalPrimitive query = make_primitive({3.0, 1.0, 1.5}, {5.5, 1.5, 1.2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(db.retrieve(query));
  }
}
BENCHMARK(BM_Retrieve)->Arg(10)->Arg(100)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
