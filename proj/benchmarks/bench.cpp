#include <benchmark/benchmark.h>

#include "reflectics/hull.hpp"
#include "reflectics/planet.hpp"
#include "reflectics/rng.hpp"

namespace {

using namespace reflectics;

void BM_MinNormHull(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    RngStream rng(11, 0);
    std::vector<Vec> vs;
    for (int i = 0; i < m; ++i) {
        Vec v(3);
        for (int k = 0; k < 3; ++k) v(k) = rng.normal();
        vs.push_back(v.normalized());
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_norm_in_hull(vs));
    }
}
BENCHMARK(BM_MinNormHull)->Arg(3)->Arg(6)->Arg(12);

void BM_PlanetStep(benchmark::State& state) {
    planet::PlanetModel model;
    model.n = static_cast<int>(state.range(0));
    model.d = 2;
    model.temperature = 0.5;
    model.gravity = planet::log_gravity(3.0);
    const DynamicsSpec spec = planet::build_dynamics(model);
    Vec x = planet::reference_config(model);
    Philox4x32 gen(5, 0);
    Vec z(model.dim());
    long k = 0;
    for (auto _ : state) {
        gen.fill_normals(static_cast<uint64_t>(k++), std::span<double>(z.data(), static_cast<size_t>(z.size())));
        StepResult r = step(spec, x, 1e-3, z);
        x = std::move(r.x_next);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_PlanetStep)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
