#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "blwave/modulation.hpp"

namespace blwave {

double YGrid::eta(int k) const {
    const int m = k <= Ny / 2 - 1 ? k : k - Ny;
    return 2.0 * std::numbers::pi * m / Ly;
}

YGrid make_ygrid(double Ly, int Ny) {
    if (!(Ly > 0.0) || !std::isfinite(Ly)) throw std::invalid_argument("make_ygrid: Ly must be positive");
    if (Ny < 8 || Ny % 2 != 0) throw std::invalid_argument("make_ygrid: Ny must be even and >= 8");
    return YGrid{Ly, Ny};
}

double smooth_step(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double f0 = std::exp(-1.0 / x), f1 = std::exp(-1.0 / (1.0 - x));
    return f1 / (f0 + f1);
}

double smooth_cutoff(double eta, double inner, double outer) {
    return smooth_step((std::abs(eta) - inner) / (outer - inner));
}

double chi1(double eta, double eta0) { return smooth_cutoff(eta, 0.5 * eta0, 0.75 * eta0); }

bool in_band(double eta, double eta0) { return std::abs(eta) <= eta0 * (1.0 + 1e-12); }

std::vector<cplx> y_forward(const std::vector<double>& f) {
    const int n = int(f.size());
    const auto plan = fft1d_plan(n);
    ComplexVec in(f.begin(), f.end()), out(n);
    plan->forward(in, out);
    return {out.begin(), out.end()};
}

std::vector<double> y_inverse(const std::vector<cplx>& s) {
    const int n = int(s.size());
    const auto plan = fft1d_plan(n);
    ComplexVec in(s.begin(), s.end()), out(n);
    plan->inverse(in, out);
    std::vector<double> r(n);
    for (int k = 0; k < n; ++k) r[k] = out[k].real();
    return r;
}

std::vector<double> band_project(const YGrid& g, const std::vector<double>& f, double eta0) {
    auto s = y_forward(f);
    for (int k = 0; k < g.Ny; ++k)
        if (!in_band(g.eta(k), eta0)) s[k] = 0.0;
    return y_inverse(s);
}

std::vector<double> y_derivative(const YGrid& g, const std::vector<double>& f, int order) {
    auto s = y_forward(f);
    for (int k = 0; k < g.Ny; ++k) {
        if (order % 2 == 1 && k == g.Ny / 2) {
            s[k] = 0.0;
            continue;
        }
        s[k] *= std::pow(cplx(0.0, g.eta(k)), order);
    }
    return y_inverse(s);
}

double l2_norm(const YGrid& g, const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s * g.dy());
}

double l1_norm(const YGrid& g, const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += std::abs(v);
    return s * g.dy();
}

double sup_norm(const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s = std::max(s, std::abs(v));
    return s;
}

std::array<double, 4> astar_matrix(const ModulationCoefficients& mc, double eta) {
    const double e2 = eta * eta;
    return {-(mc.lambda2 + mc.nu) * e2, 1.0, -mc.lambda1 * mc.lambda1 * e2, -(mc.lambda2 - mc.nu) * e2};
}

double omega_star(const ModulationCoefficients& mc, double eta) {
    const double r = mc.nu / mc.lambda1 * eta;
    const double w2 = 1.0 - r * r;
    if (!(w2 > 0.0))
        throw std::invalid_argument("omega(eta) is imaginary at eta=" + std::to_string(eta) +
                                    "; require |nu| eta < lambda1");
    return std::sqrt(w2);
}

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

std::array<double, 4> etA_symbol(const ModulationCoefficients& mc, double t, double eta) {
    const double w = omega_star(mc, eta);
    const double th = t * mc.lambda1 * eta * w;
    const double damp = std::exp(-mc.lambda2 * t * eta * eta);
    const double co = std::cos(th), si = t * sinc(th);  // sin(th) / (l1 eta w)
    const double e2 = eta * eta;
    // A_* + l2 eta^2 I
    const std::array<double, 4> m = {-mc.nu * e2, 1.0, -mc.lambda1 * mc.lambda1 * e2, mc.nu * e2};
    return {damp * (co + si * m[0]), damp * si * m[1], damp * si * m[2], damp * (co + si * m[3])};
}

ReducedState semigroup_etA(double t, const ReducedState& f, const ModulationCoefficients& mc) {
    const YGrid& g = f.grid;
    auto s1 = y_forward(f.gamma), s2 = y_forward(f.ctil);
    for (int k = 0; k < g.Ny; ++k) {
        const double eta = g.eta(k);
        if (!in_band(eta, mc.eta0)) {
            s1[k] = s2[k] = 0.0;
            continue;
        }
        const auto e = etA_symbol(mc, t, eta);
        const cplx a = s1[k], b = s2[k];
        s1[k] = e[0] * a + e[1] * b;
        s2[k] = e[2] * a + e[3] * b;
    }
    ReducedState out(g);
    out.gamma = y_inverse(s1);
    out.ctil = y_inverse(s2);
    return out;
}

namespace {

// (1/2pi) int m(eta) e^{i y eta} d eta by the trapezoid rule on the box modes.
std::vector<double> kernel_from_symbol(const YGrid& g, const std::vector<cplx>& m) {
    std::vector<cplx> s(m);
    for (int k = 0; k < g.Ny; ++k) s[k] *= (k % 2 == 0 ? 1.0 : -1.0) * g.Ny / g.Ly;
    return y_inverse(s);
}

}  // namespace

KernelSet fundamental_kernels(const ModulationCoefficients& mc, double t, const YGrid& g) {
    std::vector<cplx> m1(g.Ny), m2(g.Ny), m3(g.Ny), m3y(g.Ny);
    for (int k = 0; k < g.Ny; ++k) {
        const double eta = g.eta(k);
        const double ch = chi1(eta, mc.eta0);
        if (ch == 0.0) continue;
        const double w = omega_star(mc, eta);
        const double th = t * mc.lambda1 * eta * w;
        const double damp = std::exp(-mc.lambda2 * t * eta * eta) * ch;
        m1[k] = damp * std::cos(th);
        m2[k] = damp * eta / w * std::sin(th);
        m3[k] = damp * t * mc.lambda1 * sinc(th);  // sin(th) / (eta w)
        m3y[k] = cplx(0.0, eta) * m3[k];
    }
    KernelSet ks;
    ks.t = t;
    ks.grid = g;
    ks.K1 = kernel_from_symbol(g, m1);
    ks.K2 = kernel_from_symbol(g, m2);
    ks.K3 = kernel_from_symbol(g, m3);
    ks.dK3 = kernel_from_symbol(g, m3y);
    return ks;
}

std::vector<double> k3_convolve(const ModulationCoefficients& mc, double t, const YGrid& g,
                                const std::vector<double>& f) {
    auto s = y_forward(f);
    for (int k = 0; k < g.Ny; ++k) {
        const double eta = g.eta(k);
        const double ch = chi1(eta, mc.eta0);
        if (ch == 0.0) {
            s[k] = 0.0;
            continue;
        }
        const double w = omega_star(mc, eta);
        const double th = t * mc.lambda1 * eta * w;
        s[k] *= std::exp(-mc.lambda2 * t * eta * eta) * ch * t * mc.lambda1 * sinc(th);
    }
    return y_inverse(s);
}

double heat_kernel(double t, double y) {
    return std::exp(-y * y / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

double heat_kernel_integral(double t, double y) { return 0.5 * std::erf(y / (2.0 * std::sqrt(t))); }

double BurgersProfile::plus(double t, double y) const {
    const double tt = lambda2 * t;
    if (m_plus == 0.0) return 0.0;
    const double scale = lambda2 / p3 * m_plus;
    return scale * heat_kernel(tt, y) / (1.0 + m_plus * heat_kernel_integral(tt, y));
}

double BurgersProfile::minus(double t, double y) const {
    const double tt = lambda2 * t;
    if (m_minus == 0.0) return 0.0;
    const double scale = -lambda2 / p3 * m_minus;
    return scale * heat_kernel(tt, y) / (1.0 + m_minus * heat_kernel_integral(tt, y));
}

BurgersProfile burgers_profile(const ModulationCoefficients& mc, double mass_plus, double mass_minus) {
    if (!std::isfinite(mass_plus) || !std::isfinite(mass_minus))
        throw std::invalid_argument("burgers_profile: non-finite mass");
    if (!(mc.lambda2 > 0.0)) throw std::invalid_argument("burgers_profile: lambda2 must be positive");
    if (mc.p3 == 0.0) throw std::invalid_argument("burgers_profile: p3 = 0 has no Burgers profile");
    BurgersProfile b;
    b.lambda2 = mc.lambda2;
    b.p3 = mc.p3;
    b.m_plus = 2.0 * std::tanh(mc.p3 * mass_plus / (2.0 * mc.lambda2));
    b.m_minus = -2.0 * std::tanh(mc.p3 * mass_minus / (2.0 * mc.lambda2));
    if (!(std::abs(b.m_plus) < 2.0) || !(std::abs(b.m_minus) < 2.0))
        throw std::invalid_argument("burgers_profile: mass outside the attainable range");
    return b;
}

PhasePrediction phase_limit_predictor(const ForcingSeries& fs, const ModulationCoefficients& mc, double t,
                                      double delta) {
    const YGrid& g = fs.grid;
    const std::size_t ns = fs.s.size();
    if (fs.f.size() != ns) throw std::invalid_argument("phase_limit_predictor: sample count mismatch");
    const double l1 = mc.lambda1, l2 = mc.lambda2;
    std::vector<cplx> acc(g.Ny, 0.0);
    double total = 0.0;
    // Trapezoid weights over the samples with s <= t.
    std::size_t last = 0;
    while (last < ns && fs.s[last] <= t + 1e-12) ++last;
    for (std::size_t i = 0; i < last; ++i) {
        if (int(fs.f[i].size()) != g.Ny) throw std::invalid_argument("phase_limit_predictor: bad sample length");
        double w = 0.0;
        if (i > 0) w += 0.5 * (fs.s[i] - fs.s[i - 1]);
        if (i + 1 < last) w += 0.5 * (fs.s[i + 1] - fs.s[i]);
        if (w == 0.0) continue;
        const double tau = t - fs.s[i];
        const auto fh = y_forward(fs.f[i]);
        total += w * fh[0].real() * g.dy();
        for (int k = 0; k < g.Ny; ++k) {
            const double eta = g.eta(k);
            // H_{l2 tau} * W_tau: exp(-l2 tau eta^2) sin(l1 tau eta) / (l1 eta).
            const double m = std::exp(-l2 * tau * eta * eta) * tau * sinc(l1 * tau * eta);
            acc[k] += w * m * fh[k];
        }
    }
    PhasePrediction p;
    p.gamma = y_inverse(acc);
    p.gamma_star = total / (2.0 * l1);
    for (int k = 0; k < g.Ny; ++k) {
        const double y = std::abs(g.y(k));
        if (k == g.Ny / 2) p.center = p.gamma[k];
        if (y <= (l1 - delta) * t) p.inside_sup = std::max(p.inside_sup, std::abs(p.gamma[k] - p.gamma_star));
        if (y >= (l1 + delta) * t) p.outside_sup = std::max(p.outside_sup, std::abs(p.gamma[k]));
    }
    return p;
}

}  // namespace blwave
