#include "cdnozzle/kernels.hpp"
#include "cdnozzle/norms.hpp"

#include "../tests/test_support.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace cdnozzle;

namespace {

struct Setup {
    LagrangianDomain dom;
    GridField phi;

    explicit Setup(int n)
    {
        DomainSettings s;
        s.n1 = n;
        s.n2 = n;
        dom = build_lagrangian_domain(testing::reference_problem(1e-2), s);
        phi = GridField(dom.upper.grid);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double t = dom.upper.grid.y2[j] / dom.upper.mass_flux;
                phi(i, j) = 1e-3 * std::sin(3.0 * t) * std::cos(2.0 * dom.upper.grid.y1[i]);
            }
    }
};

Exec mode(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_CoefficientField(benchmark::State& st)
{
    Setup s(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(coefficient_field(s.dom.upper, s.phi, mode(st)));
}

void BM_NodalState(benchmark::State& st)
{
    Setup s(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(nodal_state(s.dom.upper, s.phi, mode(st)));
}

void BM_WeightedNorm(benchmark::State& st)
{
    Setup s(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(discrete_weighted_norm(s.phi, s.dom.upper.grid, 2, 0.5, -1.5, mode(st)));
}

// second argument: 0 serial reference, 1 OpenMP
BENCHMARK(BM_CoefficientField)->ArgsProduct({{65, 129}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NodalState)->ArgsProduct({{65, 129}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedNorm)->ArgsProduct({{33, 65}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
