#include "namesim/namesim.hpp"

#include <benchmark/benchmark.h>

using namespace namesim;

namespace {

void BM_BenchRhs(benchmark::State& state) {
    BathSpec b;
    b.n_modes = static_cast<int>(state.range(0));
    b.coupling = CouplingKind::position;
    b.bath_mass = 2.0;
    auto modes = sample_bath_modes(b);
    BenchGenerator gen(modes, 2.0, Closure::paper_truncated);
    Eigen::VectorXd y = Eigen::VectorXd::Random(gen.state_size());
    Eigen::VectorXd dy(gen.state_size());
    for (auto _ : state) {
        gen.rhs(y, dy, 40.0, 1.0);
        benchmark::DoNotOptimize(dy.data());
    }
    state.SetItemsProcessed(state.iterations() * gen.state_size());
}
BENCHMARK(BM_BenchRhs)->Arg(100)->Arg(200)->Arg(1000);

void BM_NameIntegration(benchmark::State& state) {
    Protocol p(-0.1, 40.0, 2.0);
    NameProblem prob;
    prob.bath.temperature = 20.0;
    prob.bath.g = 1.0;
    std::vector<double> grid(201);
    for (int i = 0; i <= 200; ++i)
        grid[i] = 0.01 * i;
    for (auto _ : state) {
        auto traj = integrate_name({-1.0, {0.5, 0.0}}, p, prob, grid);
        benchmark::DoNotOptimize(traj.samples.back().params.beta);
    }
}
BENCHMARK(BM_NameIntegration)->Unit(benchmark::kMillisecond);

void BM_FreePropagator(benchmark::State& state) {
    Protocol p(40.0, {{-0.1, 0.5}, {0.05, 0.5}, {-0.2, 1.0}});
    double t = 0.0;
    for (auto _ : state) {
        t = t < 1.9 ? t + 1e-3 : 0.0;
        auto U = free_propagator_matrix(p, t);
        benchmark::DoNotOptimize(U.data());
    }
}
BENCHMARK(BM_FreePropagator);

void BM_Attractor(benchmark::State& state) {
    Protocol p(-0.1, 40.0, 2.0);
    BathSpec b;
    b.temperature = 20.0;
    b.g = 1.0;
    for (auto _ : state) {
        auto a = instantaneous_attractor(p, b, 1.0);
        benchmark::DoNotOptimize(a.occupation);
    }
}
BENCHMARK(BM_Attractor);

} // namespace

BENCHMARK_MAIN();
