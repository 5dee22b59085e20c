#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "blwave/lab.hpp"
#include "blwave/modulation.hpp"

namespace blwave {

std::array<double, 4> reduced_symbol(const ModulationCoefficients& mc, double eta) {
    const double e2 = in_band(eta, mc.eta0) ? eta * eta : 0.0;
    return {-mc.A[0][0] * e2, 1.0 - mc.A[0][1] * e2, -mc.A[1][0] * e2, -mc.A[1][1] * e2};
}

namespace {

// Band-projected quadratic terms in spectral form, from the spectra of gamma and ctil.
void add_nonlinear(const YGrid& g, const std::vector<cplx>& sg, const std::vector<cplx>& sc,
                   const ModulationCoefficients& mc, bool variable, std::vector<cplx>& r1, std::vector<cplx>& r2) {
    const int n = g.Ny;
    std::vector<cplx> gyy(n), cyy(n), gy(n), cy(n);
    for (int k = 0; k < n; ++k) {
        const double eta = g.eta(k);
        const bool band = in_band(eta, mc.eta0);
        const double odd = k == n / 2 ? 0.0 : eta;
        gyy[k] = band ? -eta * eta * sg[k] : 0.0;
        cyy[k] = band ? -eta * eta * sc[k] : 0.0;
        gy[k] = cplx(0.0, odd) * sg[k];
        cy[k] = cplx(0.0, odd) * sc[k];
    }
    const auto c = y_inverse(sc);
    const auto g_yy = y_inverse(gyy), c_yy = y_inverse(cyy), g_y = y_inverse(gy), c_y = y_inverse(cy);
    std::vector<double> n1(n), n2(n);
    const double a15 = mc.A[0][4], a23 = mc.A[1][2];
    for (int k = 0; k < n; ++k) {
        n1[k] = a15 * g_y[k] * g_y[k];
        n2[k] = 2.0 * a23 * c_y[k] * g_y[k];
        if (variable) {
            // (a_ij(c) - a_ij(c0)) to first order in ctil.
            n1[k] += c[k] * (mc.dA[0][0] * g_yy[k] + mc.dA[0][1] * c_yy[k]);
            n2[k] += c[k] * (mc.dA[1][0] * g_yy[k] + mc.dA[1][1] * c_yy[k]);
        }
    }
    const auto f1 = y_forward(n1), f2 = y_forward(n2);
    for (int k = 0; k < n; ++k)
        if (in_band(g.eta(k), mc.eta0)) {
            r1[k] += f1[k];
            r2[k] += f2[k];
        }
}

}  // namespace

ReducedState reduced_rhs(const ReducedState& s, const ModulationCoefficients& mc, bool nonlinear,
                         bool variable_coefficients) {
    const YGrid& g = s.grid;
    const int n = g.Ny;
    const auto sg = y_forward(s.gamma), sc = y_forward(s.ctil);
    std::vector<cplx> r1(n), r2(n);
    for (int k = 0; k < n; ++k) {
        const auto a = reduced_symbol(mc, g.eta(k));
        r1[k] = a[0] * sg[k] + a[1] * sc[k];
        r2[k] = a[2] * sg[k] + a[3] * sc[k];
    }
    if (nonlinear) add_nonlinear(g, sg, sc, mc, variable_coefficients, r1, r2);
    ReducedState out(g);
    out.gamma = y_inverse(r1);
    out.ctil = y_inverse(r2);
    return out;
}

std::vector<double> b_from_ctil(const YGrid& g, const std::vector<double>& ctil, const ModulationCoefficients& mc) {
    std::vector<double> v(ctil.size());
    for (std::size_t k = 0; k < ctil.size(); ++k) v[k] = ctil[k] + 0.5 * mc.rho_pp * ctil[k] * ctil[k];
    return band_project(g, v, mc.eta0);
}

ModulationSample measure_sample(double t, const YGrid& g, const std::vector<double>& gamma,
                                const std::vector<double>& ctil, const ModulationCoefficients& mc) {
    ModulationSample m;
    m.t = t;
    const auto gy = y_derivative(g, gamma, 1);
    const auto cy = y_derivative(g, ctil, 1);
    m.c_norm = l2_norm(g, ctil);
    m.cy_norm = l2_norm(g, cy);
    m.gy_norm = l2_norm(g, gy);
    m.gamma_sup = sup_norm(gamma);
    const auto b = b_from_ctil(g, ctil, mc);
    std::vector<double> diff(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) diff[k] = b[k] - ctil[k];
    m.b_minus_c = l2_norm(g, diff);

    const double l1 = mc.lambda1;
    double mp = 0.0, mm = 0.0;
    for (int k = 0; k < g.Ny; ++k) {
        mp += (l1 * gy[k] + ctil[k]) / (2.0 * l1);
        mm += (-l1 * gy[k] + ctil[k]) / (2.0 * l1);
    }
    m.mass_plus = mp * g.dy();
    m.mass_minus = mm * g.dy();
    m.burgers_mismatch = std::numeric_limits<double>::quiet_NaN();
    if (t > 0.0 && mc.p3 != 0.0) {
        const BurgersProfile bp = burgers_profile(mc, m.mass_plus, m.mass_minus);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < g.Ny; ++k) {
            const double y = g.y(k);
            const double up = bp.plus(t, y + l1 * t), um = bp.minus(t, y - l1 * t);
            const double e1 = gy[k] - (up - um), e2 = ctil[k] - l1 * (up + um);
            num += e1 * e1 + e2 * e2;
            den += gy[k] * gy[k] + ctil[k] * ctil[k];
        }
        if (den > 0.0) m.burgers_mismatch = std::sqrt(num / den);
    }
    return m;
}

std::vector<double> ModulationTrack::times() const {
    std::vector<double> t;
    for (const auto& s : samples) t.push_back(s.t);
    return t;
}

std::vector<double> ModulationTrack::column(double ModulationSample::*field) const {
    std::vector<double> v;
    for (const auto& s : samples) v.push_back(s.*field);
    return v;
}

void ModulationTrack::write_csv(const std::string& path) const {
    SeriesRecord r;
    r.add("t", "time", times());
    r.add("c_norm", "L2", column(&ModulationSample::c_norm));
    r.add("cy_norm", "L2", column(&ModulationSample::cy_norm));
    r.add("gy_norm", "L2", column(&ModulationSample::gy_norm));
    r.add("gamma_sup", "sup", column(&ModulationSample::gamma_sup));
    r.add("burgers_mismatch", "relative L2", column(&ModulationSample::burgers_mismatch));
    r.add("b_minus_c", "L2", column(&ModulationSample::b_minus_c));
    r.add("mass_plus", "", column(&ModulationSample::mass_plus));
    r.add("mass_minus", "", column(&ModulationSample::mass_minus));
    export_series(r, path);
}

namespace {

// exp(h M) for a real 2x2 M through its trace and discriminant.
std::array<double, 4> expm2(const std::array<double, 4>& M, double h) {
    const double mu = 0.5 * (M[0] + M[3]);
    const double det = M[0] * M[3] - M[1] * M[2];
    const cplx s = std::sqrt(cplx(mu * mu - det));
    const cplx x = s * h;
    const cplx ch = std::cosh(x);
    const cplx sh = std::abs(x) < 1e-8 ? cplx(h) * (1.0 + x * x / 6.0) : std::sinh(x) / s;
    const double e = std::exp(mu * h);
    return {e * (ch + sh * (M[0] - mu)).real(), e * (sh * M[1]).real(), e * (sh * M[2]).real(),
            e * (ch + sh * (M[3] - mu)).real()};
}

struct Propagator {
    double h = 0.0;
    std::vector<std::array<double, 4>> full, half;
};

Propagator make_propagator(const YGrid& g, const ModulationCoefficients& mc, double h) {
    Propagator p;
    p.h = h;
    p.full.resize(g.Ny);
    p.half.resize(g.Ny);
    for (int k = 0; k < g.Ny; ++k) {
        const auto M = reduced_symbol(mc, g.eta(k));
        p.full[k] = expm2(M, h);
        p.half[k] = expm2(M, 0.5 * h);
    }
    return p;
}

struct Spec {
    std::vector<cplx> a, b;
};

Spec propagate(const std::vector<std::array<double, 4>>& E, const Spec& s) {
    Spec o{s.a, s.b};
    for (std::size_t k = 0; k < E.size(); ++k) {
        o.a[k] = E[k][0] * s.a[k] + E[k][1] * s.b[k];
        o.b[k] = E[k][2] * s.a[k] + E[k][3] * s.b[k];
    }
    return o;
}

Spec axpy(const Spec& x, double h, const Spec& y) {
    Spec o{x.a, x.b};
    for (std::size_t k = 0; k < x.a.size(); ++k) {
        o.a[k] += h * y.a[k];
        o.b[k] += h * y.b[k];
    }
    return o;
}

// Nonlinear rate only, in spectral form; zero when the run is linear.
Spec nonlinear_rate(const YGrid& g, const Spec& s, const ModulationCoefficients& mc, bool nonlinear, bool variable) {
    Spec o{std::vector<cplx>(g.Ny), std::vector<cplx>(g.Ny)};
    if (nonlinear) add_nonlinear(g, s.a, s.b, mc, variable, o.a, o.b);
    return o;
}

void step_if_rk4(const YGrid& g, Spec& u, const Propagator& P, const ModulationCoefficients& mc, bool nonlinear,
                 bool variable) {
    const double h = P.h;
    const Spec k1 = nonlinear_rate(g, u, mc, nonlinear, variable);
    const Spec eu = propagate(P.half, u);
    const Spec k2 = nonlinear_rate(g, propagate(P.half, axpy(u, 0.5 * h, k1)), mc, nonlinear, variable);
    const Spec k3 = nonlinear_rate(g, axpy(eu, 0.5 * h, k2), mc, nonlinear, variable);
    const Spec k4 = nonlinear_rate(g, axpy(propagate(P.full, u), h, propagate(P.half, k3)), mc, nonlinear, variable);
    Spec out = propagate(P.full, u);
    const Spec ek1 = propagate(P.full, k1), ek23 = propagate(P.half, axpy(k2, 1.0, k3));
    for (int k = 0; k < g.Ny; ++k) {
        out.a[k] += h / 6.0 * (ek1.a[k] + 2.0 * ek23.a[k] + k4.a[k]);
        out.b[k] += h / 6.0 * (ek1.b[k] + 2.0 * ek23.b[k] + k4.b[k]);
    }
    u = std::move(out);
}

}  // namespace

ModulationTrack integrate_reduced(const ReducedState& init, const ModulationCoefficients& mc,
                                  const ReducedConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw std::invalid_argument("integrate_reduced: dt and T must be positive");
    const YGrid g = init.grid;
    if (int(init.gamma.size()) != g.Ny || int(init.ctil.size()) != g.Ny)
        throw std::invalid_argument("integrate_reduced: state size does not match grid");
    std::vector<double> times = cfg.sample_times;
    if (times.empty()) {
        if (cfg.samples < 2 || !(cfg.t_first > 0.0) || cfg.t_first >= cfg.T)
            throw std::invalid_argument("integrate_reduced: bad sample spec");
        times.push_back(0.0);
        for (int i = 0; i < cfg.samples; ++i)
            times.push_back(cfg.t_first * std::pow(cfg.T / cfg.t_first, double(i) / (cfg.samples - 1)));
    }
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("integrate_reduced: sample times must increase");

    Spec u{y_forward(band_project(g, init.gamma, mc.eta0)), y_forward(band_project(g, init.ctil, mc.eta0))};
    const Propagator P = make_propagator(g, mc, cfg.dt);
    const double sup0 = std::max(sup_norm(init.gamma), sup_norm(init.ctil));

    ModulationTrack track;
    track.grid = g;
    double t = 0.0;
    for (double ts : times) {
        while (t < ts - 1e-9 * std::max(1.0, ts)) {
            const double h = std::min(cfg.dt, ts - t);
            if (std::abs(h - cfg.dt) < 1e-12 * cfg.dt) {
                step_if_rk4(g, u, P, mc, cfg.nonlinear, cfg.variable_coefficients);
                t += cfg.dt;
            } else {
                step_if_rk4(g, u, make_propagator(g, mc, h), mc, cfg.nonlinear, cfg.variable_coefficients);
                t = ts;
            }
        }
        const auto gamma = y_inverse(u.a), ctil = y_inverse(u.b);
        const double sup = std::max(sup_norm(gamma), sup_norm(ctil));
        if (!std::isfinite(sup) || (sup0 > 0.0 && sup > cfg.blowup * sup0))
            throw std::runtime_error("integrate_reduced: blow-up detected at t=" + std::to_string(t));
        track.samples.push_back(measure_sample(ts, g, gamma, ctil, mc));
        if (cfg.keep_fields) {
            track.gamma.push_back(gamma);
            track.ctil.push_back(ctil);
            track.b.push_back(b_from_ctil(g, ctil, mc));
        }
    }
    return track;
}

}  // namespace blwave
