#include <benchmark/benchmark.h>

#include <cmath>

#include "blwave/decompose.hpp"
#include "blwave/evolution.hpp"
#include "blwave/modulation.hpp"
#include "blwave/soliton.hpp"

using namespace blwave;

namespace {

const PhysParams kP{0.5, 1.0};
constexpr double kC0 = 1.05;

const ModulationCoefficients& coeffs() {
    static const ModulationCoefficients mc = modulation_coefficients(kP, kC0, default_grid1d(kP, kC0));
    return mc;
}

FieldPair perturbed_soliton(const Grid2D& g) {
    FieldPair s = line_wave_field(g, SolitonProfile(kP, kC0));
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < g.Nx(); ++j) {
            const double x = g.x(j) / 4.0, y = g.y(k) / 16.0;
            const double w = 1.0 + x * x + y * y;
            s.phi2(j, k) += 1e-3 / (w * w);
        }
    return s;
}

}  // namespace

static void BM_Step(benchmark::State& st) {
    const Grid2D g = make_grid(200.0, 512.0, int(st.range(0)), int(st.range(1)));
    EvolutionConfig cfg;
    cfg.dt = 0.05;
    cfg.frame_speed = kC0;
    cfg.integrator = st.range(2) ? Integrator::EtdRK4 : Integrator::IntegratingFactorRK4;
    const Stepper stepper(g, kP, cfg);
    FieldPair u = perturbed_soliton(g);
    for (auto _ : st) {
        u = stepper.step(u);
        benchmark::DoNotOptimize(u.phi1.values().data());
    }
    st.SetItemsProcessed(st.iterations() * g.size());
}
BENCHMARK(BM_Step)->Args({256, 64, 0})->Args({512, 128, 0})->Args({512, 128, 1})->Unit(benchmark::kMillisecond);

static void BM_Coefficients(benchmark::State& st) {
    const Grid1D g = default_grid1d(kP, kC0, -1.0, int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(modulation_coefficients(kP, kC0, g).lambda1);
}
BENCHMARK(BM_Coefficients)->Arg(256)->Arg(384)->Unit(benchmark::kMillisecond);

static void BM_Kernels(benchmark::State& st) {
    const YGrid g = make_ygrid(16384.0, int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fundamental_kernels(coeffs(), 1e3, g).K1.data());
}
BENCHMARK(BM_Kernels)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

static void BM_Reduced(benchmark::State& st) {
    const auto& mc = coeffs();
    const YGrid g = make_ygrid(8000.0, 1024);
    ReducedState f(g);
    std::vector<double> c(g.Ny);
    for (int k = 0; k < g.Ny; ++k) c[k] = 1e-2 * std::exp(-0.5 * g.y(k) * g.y(k) / 25.0);
    f.ctil = band_project(g, c, mc.eta0);
    ReducedConfig cfg;
    cfg.dt = 1.0;
    cfg.T = 1e3;
    cfg.t_first = 10.0;
    cfg.samples = 21;
    for (auto _ : st) benchmark::DoNotOptimize(integrate_reduced(f, mc, cfg).samples.back().c_norm);
}
BENCHMARK(BM_Reduced)->Unit(benchmark::kMillisecond);

static void BM_Decompose(benchmark::State& st) {
    const Grid2D g = make_grid(100.0, 128.0, 256, 32);
    static const ProjectionTable table(kP, coeffs(), g);
    const SolitonProfile s(kP, kC0);
    FieldPair phi = line_wave_field(g, s, 0.0, 0.01);
    const FieldPair u1(g);
    for (auto _ : st) benchmark::DoNotOptimize(decompose_snapshot(phi, u1, 0.0, table).residual);
}
BENCHMARK(BM_Decompose)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
