// Acceptance checks AC1..AC12. Prints one PASS/FAIL line per criterion.
// Usage: blwave_acceptance [AC1 AC2 ...]   (no arguments runs all)
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "blwave/experiment.hpp"
#include "blwave/lab.hpp"
#include "blwave/modulation.hpp"
#include "blwave/soliton.hpp"

using namespace blwave;

namespace {

constexpr double kPi = std::numbers::pi;
const PhysParams kP{0.5, 1.0};
constexpr double kC0 = 1.05;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

std::vector<double> log_times(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a * std::pow(b / a, double(i) / (n - 1));
    return t;
}

std::vector<double> gaussian(const YGrid& g, double amp, double width) {
    std::vector<double> f(g.Ny);
    for (int k = 0; k < g.Ny; ++k) f[k] = amp * std::exp(-0.5 * g.y(k) * g.y(k) / (width * width));
    return f;
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

const ModulationCoefficients& coeffs384() {
    static const ModulationCoefficients mc = modulation_coefficients(kP, kC0, default_grid1d(kP, kC0, -1.0, 384));
    return mc;
}

// 1. q_c ODE residual on [-40, 40], N = 2048, c = 1.2 and a 5-point sweep.
Outcome ac1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double c : {1.2, 1.01, 1.05, 1.1, 1.5, 2.0}) {
        const SolitonProfile s(PhysParams{0.5, 1.0}, c);
        for (int i = 0; i < 2048; ++i) worst = std::max(worst, std::abs(s.qc_residual(-40.0 + 80.0 * i / 2048)));
    }
    const double rt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst <= 1e-10 && rt < 1.0, fmt("max residual %.2e (tol 1e-10), runtime %.3f s (< 1 s)", worst, rt)};
}

// 2. Linear plane waves against e^{-i omega t}; |grad omega| <= 1.
Outcome ac2() {
    const Grid2D g = make_grid(40.0, 30.0, 64, 32);
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> mx(-12, 12), my(-8, 8);
    EvolutionConfig c;
    c.dt = 0.05;
    c.T = 10.0;
    c.nonlinear = false;
    double worst = 0.0;
    for (int n = 0; n < 10; ++n) {
        int a = mx(rng), b = my(rng);
        if (a == 0 && b == 0) a = 1;
        const double xi = 2 * kPi * a / g.Lx(), et = 2 * kPi * b / g.Ly(), w = omega(kP, xi, et);
        auto wave = [&](double t) {
            FieldPair s(g);
            for (int k = 0; k < g.Ny(); ++k)
                for (int j = 0; j < g.Nx(); ++j) {
                    const double th = xi * g.x(j) + et * g.y(k) - w * t;
                    s.phi1(j, k) = std::cos(th);
                    s.phi2(j, k) = w * std::sin(th);
                }
            return s;
        };
        const EvolutionResult r = evolve(wave(0.0), kP, c, {}, false);
        const FieldPair ex = wave(10.0);
        worst = std::max({worst, max_abs_diff(r.state.phi1, ex.phi1), max_abs_diff(r.state.phi2, ex.phi2)});
    }
    const DispersionReport d = dispersion_check(kP, make_grid(200.0, 512.0, 512, 128));
    return {worst <= 1e-6 && d.max_grad <= 1.0 + 1e-12,
            fmt("plane-wave error %.2e (tol 1e-6), max |grad omega| %.15f (<= 1+1e-12)", worst, d.max_grad)};
}

// 3. Energy drift of a perturbed soliton at 512 x 128 over [0, 50].
Outcome ac3() {
    const Grid2D g = make_grid(200.0, 512.0, 512, 128);
    FieldPair s = line_wave_field(g, SolitonProfile(kP, kC0));
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < g.Nx(); ++j) {
            const double x = g.x(j) / 4.0, y = g.y(k) / 16.0, w = 1.0 + x * x + y * y;
            s.phi1(j, k) += 1e-2 / (w * w);
            s.phi2(j, k) += 1e-2 / (w * w);
        }
    EvolutionConfig c;
    c.dt = 0.05;
    c.T = 50.0;
    c.frame_speed = kC0;
    c.snapshot_every = 20;
    const EvolutionResult r = evolve(s, kP, c, {}, false);
    double drift = 0.0;
    for (double e : r.ledger.E) drift = std::max(drift, std::abs(e / r.ledger.E[0] - 1.0));
    return {drift <= 1e-6, fmt("max relative energy drift %.2e (tol 1e-6), E0 = %.10g", drift, r.ledger.E[0])};
}

// 4. y-independent soliton after t = 20 against the exact translate.
Outcome ac4() {
    double worst = 0.0;
    std::string d;
    for (double c : {kC0, 1.2}) {
        const Grid2D g = make_grid(160.0, 8.0, 512, 8);
        const SolitonProfile prof(kP, c);
        EvolutionConfig ec;
        ec.dt = 0.02;
        ec.T = 20.0;
        const EvolutionResult r = evolve(line_wave_field(g, prof, 0.0, 20.0), kP, ec, {}, false);
        const FieldPair ex = line_wave_field(g, prof, 0.0, 20.0, 20.0);
        const double e = std::max(max_abs_diff(r.state.phi1_physical(), ex.phi1_physical()),
                                  max_abs_diff(r.state.phi2, ex.phi2));
        worst = std::max(worst, e);
        d += fmt("c=%.2f err %.2e  ", c, e);
    }
    return {worst <= 1e-4, d + "(tol 1e-4)"};
}

// 5. zeta biorthogonality, beta1 as the energy slope, signs and parity.
Outcome ac5() {
    const Grid1D g = default_grid1d(kP, kC0, -1.0, 384);
    const ZetaBasis zb = zeta_basis(kP, kC0, g);
    const double h = 1e-4;
    const double d1 = (soliton_energy(kP, kC0 + h, g) - soliton_energy(kP, kC0 - h, g)) / (2 * h);
    const double d2 = (soliton_energy(kP, kC0 + 2 * h, g) - soliton_energy(kP, kC0 - 2 * h, g)) / (4 * h);
    const double dE = (4 * d1 - d2) / 3;
    const ModulationCoefficients& mc = coeffs384();
    const double eq = std::abs(zb.beta1 / zb.beta1_alt - 1.0), en = std::abs(zb.beta1 / dE - 1.0);
    const double m11_22 = std::abs(mc.m_(1, 1) / mc.m_(2, 2) - 1.0);
    const bool ok = zb.cross_normalized <= 1e-8 && eq <= 1e-6 && en <= 1e-6 && zb.beta1 > 0 && zb.beta2 > 0 &&
                    mc.m_(1, 1) < 0 && m11_22 <= 1e-6 && mc.m_(2, 1) < 0 && std::abs(mc.m_(2, 5)) <= 1e-8;
    return {ok, fmt("<z1,z2*>/norm %.1e, beta1 %.6f, |b1/b1alt-1| %.1e, |b1/(dE/dc)-1| %.1e, beta2 %.4f, "
                    "m11 %.5f, |m11/m22-1| %.1e, m21 %.5f, |m25| %.1e",
                    zb.cross_normalized, zb.beta1, eq, en, zb.beta2, mc.m_(1, 1), m11_22, mc.m_(2, 1),
                    std::abs(mc.m_(2, 5)))};
}

// 6. Eigencurve against lambda1, lambda2; conjugate symmetry; grid doubling.
Outcome ac6() {
    const Grid1D g = default_grid1d(kP, kC0, -1.0, 384);
    const ModulationCoefficients& mc = coeffs384();
    const EigenCurve ec = eigencurve(kP, kC0, g, {0.004, 0.008, 0.012, -0.008}, mc);
    const double e1 = std::abs(ec.lambda1_fit / mc.lambda1 - 1.0), e2 = std::abs(ec.lambda2_fit / mc.lambda2 - 1.0);
    const double conj = std::abs(ec.lambda[3] - std::conj(ec.lambda[1]));
    CoefficientOptions o;
    o.check_branch = false;
    const ModulationCoefficients m2 = modulation_coefficients(kP, kC0, default_grid1d(kP, kC0, -1.0, 768), o);
    const double gd = std::max(std::abs(m2.lambda1 / mc.lambda1 - 1.0), std::abs(m2.lambda2 / mc.lambda2 - 1.0));
    return {e1 <= 1e-2 && e2 <= 2e-2 && conj <= 1e-10 && gd <= 1e-6,
            fmt("lambda1 %.6f fit %.6f (rel %.1e, tol 1e-2); lambda2 %.6f fit %.6f (rel %.1e, tol 2e-2); "
                "|lambda(-eta)-conj| %.1e; grid doubling %.1e (tol 1e-6)",
                mc.lambda1, ec.lambda1_fit, e1, mc.lambda2, ec.lambda2_fit, e2, conj, gd)};
}

// 7. Deflated spectrum in the left half plane for c0 = 1.05, alpha = alpha_c0 / 2.
Outcome ac7() {
    const Grid1D g = default_grid1d(kP, kC0, -1.0, 384);
    const ModulationCoefficients& mc = coeffs384();
    std::vector<double> etas = {0.0, 0.25 * mc.eta0, 0.5 * mc.eta0, mc.eta0};
    for (double e : {0.15, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0}) etas.push_back(e);
    const GapReport r = spectral_gap_check(kP, kC0, g, mc.eta0, mc, etas);
    return {r.max_re_outside_band < 0.0,
            fmt("max Re (deflated) %.4e, undeflated %.4e, over %zu eta samples", r.max_re_outside_band,
                r.max_re_undeflated, etas.size())};
}

// 8. Kernel decay slopes and boundedness of K3 * f.
Outcome ac8() {
    const ModulationCoefficients& mc = coeffs384();
    const YGrid g = make_ygrid(16384.0, 16384);
    const auto ts = log_times(100.0, 1e4, 41);
    std::vector<double> k1, k2, k3f;
    const auto f = gaussian(g, 1.0, 10.0);
    for (double t : ts) {
        const KernelSet ks = fundamental_kernels(mc, t, g);
        k1.push_back(l2_norm(g, ks.K1));
        k2.push_back(l1_norm(g, ks.K2));
        k3f.push_back(sup_norm(k3_convolve(mc, t, g, f)) / l1_norm(g, f));
    }
    const YGrid gl = make_ygrid(65536.0, 16384);
    const auto tl = log_times(1e3, 1e5, 21);
    std::vector<double> dk3;
    for (double t : tl) dk3.push_back(l2_norm(gl, fundamental_kernels(mc, t, gl).dK3));
    const double s1 = fit_decay_exponent(ts, k1, 100.0, 1e4).slope;
    const double s2 = fit_decay_exponent(ts, k2, 100.0, 1e4).slope;
    const double s3 = fit_decay_exponent(tl, dk3, 1e3, 1e5).slope;
    const double s4 = fit_decay_exponent(ts, k3f, 1e3, 1e4).slope;
    const double kmax = *std::max_element(k3f.begin(), k3f.end());
    const bool ok = std::abs(s1 + 0.25) <= 0.03 && std::abs(s2 + 0.5) <= 0.05 && std::abs(s3 + 0.25) <= 0.03 &&
                    kmax <= 1.0 && std::abs(s4) <= 0.05;
    return {ok, fmt("K1 L2 %.4f (-0.25+-0.03), K2 L1 %.4f (-0.5+-0.05), dyK3 L2 %.4f on [1e3,1e5] (-0.25+-0.03), "
                    "sup_t |K3*f|/|f|_1 %.4f (<= 1), last-decade slope %.4f",
                    s1, s2, s3, kmax, s4)};
}

ModulationTrack reduced_run() {
    const ModulationCoefficients& mc = coeffs384();
    const YGrid g = make_ygrid(8000.0, 1024);
    ReducedState f(g);
    f.ctil = band_project(g, gaussian(g, 1e-2, 5.0), mc.eta0);
    ReducedConfig cfg;
    cfg.dt = 1.0;
    cfg.T = 1e4;
    cfg.t_first = 10.0;
    cfg.samples = 61;
    return integrate_reduced(f, mc, cfg);
}

// 9. Reduced-system decay over [1e2, 1e4].
Outcome ac9() {
    const ModulationTrack tr = reduced_run();
    const auto t = tr.times();
    const double sc = fit_decay_exponent(t, tr.column(&ModulationSample::c_norm), 100.0, 1e4).slope;
    const double scy = fit_decay_exponent(t, tr.column(&ModulationSample::cy_norm), 100.0, 1e4).slope;
    double gmax = 0.0, glast = 0.0;
    for (const auto& s : tr.samples)
        if (s.t >= 100.0) {
            gmax = std::max(gmax, s.gamma_sup);
            glast = s.gamma_sup;
        }
    const double sg = fit_decay_exponent(t, tr.column(&ModulationSample::gamma_sup), 1e3, 1e4).slope;
    const bool ok = std::abs(sc + 0.25) <= 0.05 && std::abs(scy + 0.75) <= 0.1 && std::abs(sg) <= 0.05;
    return {ok, fmt("||ctil|| %.4f (-0.25+-0.05), ||ctil_y|| %.4f (-0.75+-0.1), sup|gamma| max %.3e final %.3e "
                    "last-decade slope %.4f (|.| <= 0.05)",
                    sc, scy, gmax, glast, sg)};
}

// 10. Burgers profile identities; mismatch decreasing over the final decade.
Outcome ac10() {
    const ModulationCoefficients& mc = coeffs384();
    const BurgersProfile b = burgers_profile(mc, 1.3, 0.7);
    double ss = 0.0;
    for (double lam : {0.5, 2.0, 7.3})
        for (double t : {0.3, 4.0})
            for (double y : {-3.0, 0.0, 1.1, 6.0}) {
                ss = std::max(ss, std::abs(lam * b.plus(lam * lam * t, lam * y) - b.plus(t, y)));
                ss = std::max(ss, std::abs(lam * b.minus(lam * lam * t, lam * y) - b.minus(t, y)));
            }
    // u_t = lambda2 u_yy +- p3 (u^2)_y by fourth-order differences.
    double res = 0.0;
    const double h = 1e-2, ht = 1e-2;
    for (double t : {5.0, 20.0})
        for (double y = -15.0; y <= 15.0; y += 0.5)
            for (int sgn : {1, -1}) {
                auto u = [&](double tt, double yy) { return sgn > 0 ? b.plus(tt, yy) : b.minus(tt, yy); };
                const double ut = (-u(t + 2 * ht, y) + 8 * u(t + ht, y) - 8 * u(t - ht, y) + u(t - 2 * ht, y)) / (12 * ht);
                const double uyy =
                    (-u(t, y + 2 * h) + 16 * u(t, y + h) - 30 * u(t, y) + 16 * u(t, y - h) - u(t, y - 2 * h)) /
                    (12 * h * h);
                auto u2 = [&](double yy) { return u(t, yy) * u(t, yy); };
                const double u2y = (-u2(y + 2 * h) + 8 * u2(y + h) - 8 * u2(y - h) + u2(y - 2 * h)) / (12 * h);
                res = std::max(res, std::abs(ut - mc.lambda2 * uyy - sgn * mc.p3 * u2y));
            }
    const ModulationTrack tr = reduced_run();
    double m_first = NAN, m_last = NAN;
    for (const auto& s : tr.samples) {
        if (s.t >= 1e3 && std::isnan(m_first)) m_first = s.burgers_mismatch;
        if (s.t <= 1e4) m_last = s.burgers_mismatch;
    }
    const bool ok = ss <= 1e-12 && res <= 1e-8 && m_last < m_first;
    return {ok, fmt("self-similarity %.1e (tol 1e-12), Burgers residual %.1e (tol 1e-8), mismatch %.4f at t=1e3 "
                    "-> %.4f at t=1e4",
                    ss, res, m_first, m_last)};
}

// 11. End-to-end 2D run with the default scenario.
Outcome ac11() {
    ExperimentConfig cfg;  // 512 x 128, T = 200, eps = 1e-3 localized bump
    const ExperimentResult r = run_experiment(cfg, "");
    double rmax = 0.0;
    for (double v : r.residual) rmax = std::max(rmax, v);
    const auto t = r.track.times();
    const auto gs = r.track.column(&ModulationSample::gamma_sup);
    // Bounded: sup|gamma| grows slower than t^{0.1} over the fit window.
    const FitResult gfit = fit_decay_exponent(t, gs, cfg.fit_t_min, cfg.fit_t_max, 0, cfg.seed);
    const double ratio = r.outside.back() / r.plateau.back();
    const bool ok = rmax <= 1e-10 && r.has_fit && std::abs(r.c_fit.slope + 0.25) <= 0.1 && gfit.slope <= 0.1 &&
                    ratio <= 0.25 && r.runtime_s <= 3600.0;
    return {ok, fmt("max residual %.1e (tol 1e-10), ||ctil|| slope %.4f [%.4f, %.4f] (-0.25+-0.1), "
                    "sup|gamma| slope %.4f (<= 0.1), outside/plateau %.3f (<= 0.25), runtime %.0f s",
                    rmax, r.has_fit ? r.c_fit.slope : NAN, r.c_fit.ci_low, r.c_fit.ci_high, gfit.slope, ratio,
                    r.runtime_s)};
}

// 12. Resonant-mode scenario: plateau gamma_* >= K eps with K > 0 for each eps.
Outcome ac12() {
    std::vector<double> ks;
    std::string d;
    for (double eps : {5e-4, 1e-3, 2e-3}) {
        ExperimentConfig cfg;
        cfg.perturbation = Perturbation::ResonantMode;
        cfg.epsilon = eps;
        cfg.Ly = 1024.0;
        const ExperimentResult r = run_experiment(cfg, "");
        // gamma_* from the mean of gamma over the inner half of the cone at the final time.
        const auto& gam = r.track.gamma.back();
        const double tf = r.track.samples.back().t, half = 0.5 * r.coefficients.lambda1 * tf;
        double s = 0.0;
        int n = 0;
        for (int k = 0; k < r.track.grid.Ny; ++k)
            if (std::abs(r.track.grid.y(k)) <= half) {
                s += gam[k];
                ++n;
            }
        const double gstar = n ? s / n : NAN;
        ks.push_back(gstar / eps);
        d += fmt("eps %.0e: gamma_* %.3e (K %.3f)  ", eps, gstar, gstar / eps);
    }
    const double kmin = *std::min_element(ks.begin(), ks.end()), kmax = *std::max_element(ks.begin(), ks.end());
    return {kmin > 0.0 && kmin >= 0.5 * kmax, d + fmt("K = %.3f (> 0, spread within 2x)", kmin)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<std::string, std::function<Outcome()>> all = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
        {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12}};
    std::vector<std::string> which;
    for (int i = 1; i < argc; ++i) which.push_back(argv[i]);
    if (which.empty())
        for (int i = 1; i <= 12; ++i) which.push_back("AC" + std::to_string(i));
    int failed = 0;
    for (const auto& name : which) {
        const auto it = all.find(name);
        if (it == all.end()) {
            std::printf("%s FAIL unknown criterion\n", name.c_str());
            ++failed;
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it->second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s %s [%.1f s]\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), dt);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
