// Serial reference kernels against their OpenMP versions on torus grids.
#include "cklab/geometry.hpp"
#include "cklab/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

namespace {

using namespace cklab;

struct Problem {
    std::shared_ptr<MetricSpec> metric;
    Stencil stencil;
    Field u;
    Field out;
};

Problem make_problem(int grid) {
    Problem p;
    p.metric = std::make_shared<MetricSpec>(torus_perturbed_chart(2, grid, 0.5, 1.0, 0.01));
    p.stencil = p.metric->stencil(0.5);
    p.u = p.metric->sample([](const Point& y) { return std::sin(y[0]) * std::cos(2 * y[1]); });
    p.out = Field::Zero(p.u.size());
    return p;
}

std::span<const double> view(const Field& f) { return {f.data(), static_cast<std::size_t>(f.size())}; }

void BM_LaplacianSerial(benchmark::State& state) {
    Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        kernels::laplacian_apply_serial(*p.stencil.pattern, view(p.stencil.weight), view(p.stencil.conductance),
                                        view(p.u), {p.out.data(), static_cast<std::size_t>(p.out.size())});
        benchmark::DoNotOptimize(p.out.data());
    }
}

void BM_LaplacianOmp(benchmark::State& state) {
    Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        kernels::laplacian_apply_omp(*p.stencil.pattern, view(p.stencil.weight), view(p.stencil.conductance),
                                     view(p.u), {p.out.data(), static_cast<std::size_t>(p.out.size())});
        benchmark::DoNotOptimize(p.out.data());
    }
}

void BM_DirichletSerial(benchmark::State& state) {
    Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::dirichlet_serial(*p.stencil.pattern, view(p.stencil.conductance), view(p.u)));
}

void BM_DirichletOmp(benchmark::State& state) {
    Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::dirichlet_omp(*p.stencil.pattern, view(p.stencil.conductance), view(p.u)));
}

void BM_PowerSumSerial(benchmark::State& state) {
    Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_power_sum_serial(view(p.stencil.weight), view(p.u), 10.0));
}

void BM_PowerSumOmp(benchmark::State& state) {
    Problem p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_power_sum_omp(view(p.stencil.weight), view(p.u), 10.0));
}

}  // namespace

BENCHMARK(BM_LaplacianSerial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_LaplacianOmp)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_DirichletSerial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_DirichletOmp)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_PowerSumSerial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_PowerSumOmp)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
