#include <benchmark/benchmark.h>

#include <complex>

#include "spinflip/cylfun.hpp"
#include "spinflip/rate.hpp"
#include "spinflip/reflect.hpp"
#include "spinflip/stack.hpp"

using namespace spinflip;

namespace {

const stack::PhysicalConstants kC{};

stack::Transition reference_transition() { return {560e3, 0.125, 300.0}; }

stack::WireStack reference_stack() {
    double k0 = reference_transition().k3(kC);
    return {stack::Layer::dielectric(185e-6, stack::rel_permittivity(85e-6, k0)),
            stack::Layer::dielectric(240e-6, stack::rel_permittivity(110e-6, k0))};
}

void BM_CylPair(benchmark::State& state) {
    int n = int(state.range(0));
    std::complex<double> z{2.17, 2.18};
    for (auto _ : state) {
        auto v = cylfun::cyl_h1(n, z);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_CylPair)->Arg(1)->Arg(20)->Arg(200);

void BM_CylPairLargeArg(benchmark::State& state) {
    std::complex<double> z{240.0, 240.0};
    for (auto _ : state) {
        auto v = cylfun::cyl_h1(int(state.range(0)), z);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_CylPairLargeArg)->Arg(5)->Arg(50);

void BM_ReflectionBundle(benchmark::State& state) {
    reflect::Evaluator ev(reference_stack(), reference_transition(), kC);
    int n = int(state.range(0));
    double q = double(state.range(1));
    for (auto _ : state) {
        auto b = ev.bundle_scaled(n, q);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_ReflectionBundle)->Args({1, 2})->Args({5, 100000})->Args({20, 1000000});

void BM_ModeIntegral(benchmark::State& state) {
    auto ws = reference_stack();
    auto tr = reference_transition();
    stack::FieldPoint fp(50e-6);
    rate::QuadPolicy pol;
    pol.quad_rel_tol = 1e-7;
    pol.quad_abs_tol = 1e-7;
    int n = int(state.range(0));
    for (auto _ : state) {
        auto mi = rate::mode_integral(n, ws, tr, fp, pol, kC);
        benchmark::DoNotOptimize(mi);
    }
}
BENCHMARK(BM_ModeIntegral)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
