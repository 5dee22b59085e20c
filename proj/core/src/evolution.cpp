#include "blwave/evolution.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "blwave/parallel.hpp"

namespace blwave {

Integrator parse_integrator(const std::string& name) {
    if (name == "if-rk4" || name == "imex" || name == "imex-spectral") return Integrator::IntegratingFactorRK4;
    if (name == "etd-rk4" || name == "etdrk4") return Integrator::EtdRK4;
    throw std::invalid_argument("unknown integrator '" + name + "' (if-rk4 | etd-rk4)");
}

std::string to_string(Integrator i) { return i == Integrator::EtdRK4 ? "etd-rk4" : "if-rk4"; }

int EvolutionConfig::steps() const { return int(std::llround(T / dt)); }

void EvolutionConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("EvolutionConfig: dt must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("EvolutionConfig: T must be positive");
    const double n = T / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
        throw std::invalid_argument("EvolutionConfig: T/dt must be an integer");
    if (snapshot_every < 0) throw std::invalid_argument("EvolutionConfig: snapshot cadence must be >= 0");
    if (snapshot_every > 0 && steps() % snapshot_every != 0)
        throw std::invalid_argument("EvolutionConfig: snapshot cadence must divide the step count");
    if (sponge.width < 0.0 || sponge.strength < 0.0) throw std::invalid_argument("EvolutionConfig: bad sponge");
}

double omega(const PhysParams& p, double xi, double eta) {
    const double k2 = xi * xi + eta * eta;
    return std::sqrt(k2 * (1.0 + p.a * k2) / (1.0 + p.b * k2));
}

namespace {

void check_finite(const RealVec& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite value in ") + what);
}

// Wavenumber tables on the half spectrum; odd-order factors vanish at Nyquist.
struct Waves {
    int nxh, ny;
    std::vector<double> kx, ky, k2, kx2, ky2;
    explicit Waves(const Grid2D& g) : nxh(g.Nxh()), ny(g.Ny()) {
        const std::size_t n = g.spec_size();
        kx.resize(n);
        ky.resize(n);
        k2.resize(n);
        for (int k = 0; k < ny; ++k)
            for (int j = 0; j < nxh; ++j) {
                const std::size_t m = std::size_t(k) * nxh + j;
                const double xi = 2.0 * std::numbers::pi * Grid2D::signed_index(j, g.Nx()) / g.Lx();
                const double et = g.eta()[k];
                kx[m] = (j == g.Nx() / 2) ? 0.0 : xi;
                ky[m] = (k == ny / 2) ? 0.0 : et;
                // Nyquist wavenumber magnitude is pi/dx in either sign convention.
                const double xr = (j == g.Nx() / 2) ? std::numbers::pi / g.dx() : xi;
                k2[m] = xr * xr + et * et;
            }
    }
};

double half_weight(int j, int nx) { return (j == 0 || j == nx / 2) ? 1.0 : 2.0; }

ComplexVec times_i(const std::vector<double>& k, const ComplexVec& s) {
    ComplexVec out(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) out[m] = cplx(0.0, k[m]) * s[m];
    return out;
}

RealVec to_phys(const Grid2D& g, const ComplexVec& s) {
    RealVec r;
    g.fft().inverse(s, r);
    return r;
}

ComplexVec fwd(const Grid2D& g, const RealVec& v) {
    ComplexVec s;
    g.fft().forward(v, s);
    return s;
}

double sponge_weight(double x, double Lx, const Sponge& sp) {
    const double d = 0.5 * Lx - std::abs(x);
    if (d >= sp.width) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * d / sp.width);
    return c * c;
}

}  // namespace

Stepper::Stepper(const Grid2D& g, const PhysParams& p, const EvolutionConfig& cfg) : g_(g), p_(p), cfg_(cfg) {
    p.validate();
    cfg.validate();
    const Waves w(g);
    kx_ = w.kx;
    ky_ = w.ky;
    k2_ = w.k2;
    const std::size_t n = g.spec_size();
    binv_.resize(n);
    keep_.resize(n);
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < g.Nxh(); ++j) {
            const std::size_t m = std::size_t(k) * g.Nxh() + j;
            binv_[m] = 1.0 / (1.0 + p.b * k2_[m]);
            keep_[m] = dealias_keep(g, j, k);
        }
    if (cfg.sponge.active()) {
        sponge_.resize(g.size());
        for (int k = 0; k < g.Ny(); ++k)
            for (int j = 0; j < g.Nx(); ++j)
                sponge_[std::size_t(k) * g.Nx() + j] = cfg.sponge.strength * sponge_weight(g.x(j), g.Lx(), cfg.sponge);
    }
    auto make = [&](double h) {
        Prop P;
        P.ph.resize(n);
        P.c.resize(n);
        P.s.resize(n);
        P.w.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double om = std::sqrt(k2_[m] * (1.0 + p.a * k2_[m]) * binv_[m]);
            P.ph[m] = std::polar(1.0, cfg.frame_speed * kx_[m] * h);
            P.c[m] = std::cos(om * h);
            P.s[m] = om > 0.0 ? std::sin(om * h) / om : h;
            P.w[m] = om * std::sin(om * h);
        }
        return P;
    };
    full_ = make(cfg.dt);
    half_ = make(0.5 * cfg.dt);
    if (cfg.integrator == Integrator::EtdRK4) setup_etd();
}

void Stepper::setup_etd() {
    const std::size_t n = g_.spec_size();
    e_.resize(n);
    eh_.resize(n);
    q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    const double h = cfg_.dt;
    using M8 = Eigen::Matrix<cplx, 8, 8>;
    using M2 = Eigen::Matrix<cplx, 2, 2>;
    // exp of [[A, I, 0, 0], [0, 0, I, 0], [0, 0, 0, I], [0, 0, 0, 0]] carries
    // phi_0..phi_3 of A in its first block row.
    auto phis = [](const M2& A, M2 out[4]) {
        M8 Z = M8::Zero();
        Z.block<2, 2>(0, 0) = A;
        for (int b = 0; b < 3; ++b) Z.block<2, 2>(2 * b, 2 * b + 2) = M2::Identity();
        const M8 E = Z.exp();
        for (int b = 0; b < 4; ++b) out[b] = E.block<2, 2>(0, 2 * b);
    };
    auto store = [](const M2& m) { return Mat2{m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; };
    for (std::size_t m = 0; m < n; ++m) {
        const double om2 = k2_[m] * (1.0 + p_.a * k2_[m]) * binv_[m];
        M2 M;
        M << cplx(0.0, cfg_.frame_speed * kx_[m]), 1.0, -om2, cplx(0.0, cfg_.frame_speed * kx_[m]);
        M2 F[4], Fh[4];
        phis(h * M, F);
        phis(0.5 * h * M, Fh);
        e_[m] = store(F[0]);
        eh_[m] = store(Fh[0]);
        q_[m] = store(0.5 * h * Fh[1]);
        f1_[m] = store(h * (F[1] - 3.0 * F[2] + 4.0 * F[3]));
        f2_[m] = store(h * (F[2] - 2.0 * F[3]));
        f3_[m] = store(h * (4.0 * F[3] - F[2]));
    }
}

Stepper::Spec Stepper::to_spec(const FieldPair& s) const {
    if (s.grid() != g_) throw std::invalid_argument("Stepper: grid mismatch");
    Spec u;
    u.s1 = s.phi1.spectrum();
    u.s2 = s.phi2.spectrum();
    u.gx = s.gx;
    u.gy = s.gy;
    return u;
}

FieldPair Stepper::from_spec(const Spec& u) const {
    return FieldPair(Field2D::from_spectrum(g_, u.s1), Field2D::from_spectrum(g_, u.s2), u.gx, u.gy);
}

void Stepper::nonlinear_rate(const Spec& u, Spec& out) const {
    const std::size_t n = g_.spec_size();
    out.s1.assign(n, 0.0);
    out.s2.assign(n, 0.0);
    out.gx = out.gy = 0.0;
    const double nn = double(g_.Nx()) * g_.Ny();
    out.s1[0] = cfg_.frame_speed * u.gx * nn;
    const bool need_phi2 = cfg_.nonlinear || cfg_.sponge.active();
    if (!need_phi2) return;

    ComplexVec t1 = u.s1, t2 = u.s2;
    if (cfg_.dealias)
        for (std::size_t m = 0; m < n; ++m)
            if (!keep_[m]) t1[m] = t2[m] = 0.0;
    const RealVec f2 = to_phys(g_, t2);
    check_finite(f2, "phi2");
    RealVec prod(g_.size(), 0.0);
    if (cfg_.nonlinear) {
        ComplexVec lap(n);
        for (std::size_t m = 0; m < n; ++m) lap[m] = -k2_[m] * t1[m];
        const RealVec ax = to_phys(g_, times_i(kx_, t1)), ay = to_phys(g_, times_i(ky_, t1));
        const RealVec l1 = to_phys(g_, lap);
        const RealVec bx = to_phys(g_, times_i(kx_, t2)), by = to_phys(g_, times_i(ky_, t2));
        const double gx = u.gx, gy = u.gy;
        parallel_for(prod.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                prod[i] = f2[i] * l1[i] + 2.0 * ((gx + ax[i]) * bx[i] + (gy + ay[i]) * by[i]);
        });
        const ComplexVec P = fwd(g_, prod);
        for (std::size_t m = 0; m < n; ++m) out.s2[m] = (cfg_.dealias && !keep_[m]) ? 0.0 : -binv_[m] * P[m];
    }
    if (cfg_.sponge.active()) {
        RealVec d(g_.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = sponge_[i] * f2[i];
        const ComplexVec D = fwd(g_, d);
        for (std::size_t m = 0; m < n; ++m) out.s2[m] -= D[m];
    }
}

void Stepper::apply_prop(const Prop& P, const Spec& in, Spec& out) const {
    const std::size_t n = in.s1.size();
    out.s1.resize(n);
    out.s2.resize(n);
    out.gx = in.gx;
    out.gy = in.gy;
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
            const cplx a = in.s1[m], b = in.s2[m];
            out.s1[m] = P.ph[m] * (P.c[m] * a + P.s[m] * b);
            out.s2[m] = P.ph[m] * (-P.w[m] * a + P.c[m] * b);
        }
    });
}

namespace {

// y = x + h * z over both components.
void axpy(Stepper::Spec& y, const Stepper::Spec& x, double h, const Stepper::Spec& z) {
    const std::size_t n = x.s1.size();
    y.s1.resize(n);
    y.s2.resize(n);
    y.gx = x.gx;
    y.gy = x.gy;
    for (std::size_t m = 0; m < n; ++m) {
        y.s1[m] = x.s1[m] + h * z.s1[m];
        y.s2[m] = x.s2[m] + h * z.s2[m];
    }
}

}  // namespace

void Stepper::step_if(Spec& u) const {
    const double h = cfg_.dt;
    Spec k1, k2, k3, k4, tmp, tmp2, eu, ehu;
    nonlinear_rate(u, k1);
    apply_prop(half_, u, ehu);
    apply_prop(full_, u, eu);
    axpy(tmp, u, 0.5 * h, k1);
    apply_prop(half_, tmp, tmp2);
    nonlinear_rate(tmp2, k2);
    axpy(tmp, ehu, 0.5 * h, k2);
    nonlinear_rate(tmp, k3);
    apply_prop(half_, k3, tmp2);
    axpy(tmp, eu, h, tmp2);
    nonlinear_rate(tmp, k4);
    // u+ = E u + h/6 (E k1 + 2 E_half (k2 + k3) + k4)
    Spec ek1, s23, es23;
    apply_prop(full_, k1, ek1);
    axpy(s23, k2, 1.0, k3);
    apply_prop(half_, s23, es23);
    const std::size_t n = u.s1.size();
    for (std::size_t m = 0; m < n; ++m) {
        u.s1[m] = eu.s1[m] + h / 6.0 * (ek1.s1[m] + 2.0 * es23.s1[m] + k4.s1[m]);
        u.s2[m] = eu.s2[m] + h / 6.0 * (ek1.s2[m] + 2.0 * es23.s2[m] + k4.s2[m]);
    }
}

namespace {

inline void mv(const std::array<cplx, 4>& M, cplx a, cplx b, cplx& o1, cplx& o2) {
    o1 = M[0] * a + M[1] * b;
    o2 = M[2] * a + M[3] * b;
}

}  // namespace

void Stepper::step_etd(Spec& u) const {
    const std::size_t n = u.s1.size();
    Spec Nu, Na, Nb, Nc, a, b, c;
    for (Spec* s : {&a, &b, &c}) {
        s->s1.resize(n);
        s->s2.resize(n);
        s->gx = u.gx;
        s->gy = u.gy;
    }
    nonlinear_rate(u, Nu);
    for (std::size_t m = 0; m < n; ++m) {
        cplx x1, x2, y1, y2;
        mv(eh_[m], u.s1[m], u.s2[m], x1, x2);
        mv(q_[m], Nu.s1[m], Nu.s2[m], y1, y2);
        a.s1[m] = x1 + y1;
        a.s2[m] = x2 + y2;
    }
    nonlinear_rate(a, Na);
    for (std::size_t m = 0; m < n; ++m) {
        cplx x1, x2, y1, y2;
        mv(eh_[m], u.s1[m], u.s2[m], x1, x2);
        mv(q_[m], Na.s1[m], Na.s2[m], y1, y2);
        b.s1[m] = x1 + y1;
        b.s2[m] = x2 + y2;
    }
    nonlinear_rate(b, Nb);
    for (std::size_t m = 0; m < n; ++m) {
        cplx x1, x2, y1, y2;
        mv(eh_[m], a.s1[m], a.s2[m], x1, x2);
        mv(q_[m], 2.0 * Nb.s1[m] - Nu.s1[m], 2.0 * Nb.s2[m] - Nu.s2[m], y1, y2);
        c.s1[m] = x1 + y1;
        c.s2[m] = x2 + y2;
    }
    nonlinear_rate(c, Nc);
    for (std::size_t m = 0; m < n; ++m) {
        cplx e1, e2, p1, p2, q1, q2, r1, r2;
        mv(e_[m], u.s1[m], u.s2[m], e1, e2);
        mv(f1_[m], Nu.s1[m], Nu.s2[m], p1, p2);
        mv(f2_[m], Na.s1[m] + Nb.s1[m], Na.s2[m] + Nb.s2[m], q1, q2);
        mv(f3_[m], Nc.s1[m], Nc.s2[m], r1, r2);
        u.s1[m] = e1 + p1 + 2.0 * q1 + r1;
        u.s2[m] = e2 + p2 + 2.0 * q2 + r2;
    }
}

void Stepper::step_spec(Spec& u) const {
    if (cfg_.integrator == Integrator::EtdRK4)
        step_etd(u);
    else
        step_if(u);
}

FieldPair Stepper::step(const FieldPair& s) const {
    Spec u = to_spec(s);
    step_spec(u);
    return from_spec(u);
}

double Stepper::energy_spec(const Spec& u) const {
    const int nxh = g_.Nxh(), nx = g_.Nx();
    const double nn = double(nx) * g_.Ny();
    double e = 0.0;
    for (int k = 0; k < g_.Ny(); ++k)
        for (int j = 0; j < nxh; ++j) {
            const std::size_t m = std::size_t(k) * nxh + j;
            const double grad2 = kx_[m] * kx_[m] + ky_[m] * ky_[m];
            const double a1 = std::norm(u.s1[m]), a2 = std::norm(u.s2[m]);
            e += half_weight(j, nx) * ((grad2 + p_.a * k2_[m] * k2_[m]) * a1 + (1.0 + p_.b * grad2) * a2);
        }
    const double area = g_.Lx() * g_.Ly();
    return 0.5 * e * area / (nn * nn) + 0.5 * (u.gx * u.gx + u.gy * u.gy) * area;
}

FieldPair step(const FieldPair& state, const PhysParams& p, const EvolutionConfig& cfg) {
    return Stepper(state.grid(), p, cfg).step(state);
}

FieldPair rhs_bl(const FieldPair& state, const PhysParams& p, double frame_speed, bool dealias, bool nonlinear) {
    EvolutionConfig cfg;
    cfg.frame_speed = frame_speed;
    cfg.dealias = dealias;
    cfg.nonlinear = nonlinear;
    const Stepper st(state.grid(), p, cfg);
    check_finite(state.phi1.values(), "phi1");
    check_finite(state.phi2.values(), "phi2");
    Stepper::Spec u = st.to_spec(state), r;
    st.nonlinear_rate(u, r);
    const Waves w(state.grid());
    for (std::size_t m = 0; m < u.s1.size(); ++m) {
        const double om2 = w.k2[m] * (1.0 + p.a * w.k2[m]) / (1.0 + p.b * w.k2[m]);
        const cplx adv(0.0, frame_speed * w.kx[m]);
        r.s1[m] += adv * u.s1[m] + u.s2[m];
        r.s2[m] += adv * u.s2[m] - om2 * u.s1[m];
    }
    FieldPair out = st.from_spec(r);
    out.gx = out.gy = 0.0;
    check_finite(out.phi1.values(), "rhs");
    check_finite(out.phi2.values(), "rhs");
    return out;
}

namespace {

struct Pointwise {
    RealVec g1x, g1y, lap1, f2, g2x, g2y;
};

Pointwise pointwise(const FieldPair& s) {
    const Grid2D& g = s.grid();
    const Waves w(g);
    const ComplexVec s1 = s.phi1.spectrum(), s2 = s.phi2.spectrum();
    ComplexVec lap(s1.size());
    for (std::size_t m = 0; m < s1.size(); ++m) lap[m] = -w.k2[m] * s1[m];
    Pointwise pw;
    pw.g1x = to_phys(g, times_i(w.kx, s1));
    pw.g1y = to_phys(g, times_i(w.ky, s1));
    for (double& v : pw.g1x) v += s.gx;
    for (double& v : pw.g1y) v += s.gy;
    pw.lap1 = to_phys(g, lap);
    pw.f2 = s.phi2.values();
    pw.g2x = to_phys(g, times_i(w.kx, s2));
    pw.g2y = to_phys(g, times_i(w.ky, s2));
    return pw;
}

RealVec density(const Pointwise& pw, const PhysParams& p) {
    RealVec e(pw.f2.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = 0.5 * (pw.g1x[i] * pw.g1x[i] + pw.g1y[i] * pw.g1y[i] + p.a * pw.lap1[i] * pw.lap1[i] +
                      pw.f2[i] * pw.f2[i] + p.b * (pw.g2x[i] * pw.g2x[i] + pw.g2y[i] * pw.g2y[i]));
    return e;
}

}  // namespace

double energy_total(const FieldPair& state, const PhysParams& p) {
    const Grid2D& g = state.grid();
    const RealVec e = density(pointwise(state), p);
    double s = 0.0;
    for (double v : e) s += v;
    return s * g.dx() * g.dy();
}

EnergyDensityFlux energy_density_flux(const FieldPair& state, const PhysParams& p, bool dealias) {
    const Grid2D& g = state.grid();
    const Waves w(g);
    const Pointwise pw = pointwise(state);
    const FieldPair rate = rhs_bl(state, p, 0.0, dealias);
    const ComplexVec r2s = rate.phi2.spectrum();
    const RealVec rx = to_phys(g, times_i(w.kx, r2s)), ry = to_phys(g, times_i(w.ky, r2s));
    const RealVec& r2 = rate.phi2.values();
    ComplexVec lap2s = state.phi2.spectrum();
    for (std::size_t m = 0; m < lap2s.size(); ++m) lap2s[m] *= -w.k2[m];
    const RealVec lap2 = to_phys(g, lap2s);

    // B^-1 A grad phi1 = G + B^-1 A grad(periodic part).
    ComplexVec s1 = state.phi1.spectrum();
    for (std::size_t m = 0; m < s1.size(); ++m) s1[m] *= (1.0 + p.a * w.k2[m]) / (1.0 + p.b * w.k2[m]);
    RealVec bax = to_phys(g, times_i(w.kx, s1)), bay = to_phys(g, times_i(w.ky, s1));
    const std::size_t n = pw.f2.size();
    RealVec X(n);
    for (std::size_t i = 0; i < n; ++i) {
        bax[i] += state.gx;
        bay[i] += state.gy;
        X[i] = pw.f2[i] * pw.lap1[i] + 2.0 * (pw.g1x[i] * pw.g2x[i] + pw.g1y[i] * pw.g2y[i]);
    }
    ComplexVec Xs = fwd(g, X);
    for (std::size_t m = 0; m < Xs.size(); ++m) Xs[m] /= (1.0 + p.b * w.k2[m]);
    const RealVec bxx = to_phys(g, times_i(w.kx, Xs)), bxy = to_phys(g, times_i(w.ky, Xs));

    EnergyDensityFlux out{Field2D(g), Field2D(g), Field2D(g)};
    RealVec& E = out.density.values();
    RealVec& Fx = out.flux_x.values();
    RealVec& Fy = out.flux_y.values();
    E = density(pw, p);
    RealVec dEdt(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f2 = pw.f2[i];
        Fx[i] = f2 * bax[i] + p.a * pw.lap1[i] * pw.g2x[i] - p.b * f2 * bxx[i] - f2 * f2 * pw.g1x[i];
        Fy[i] = f2 * bay[i] + p.a * pw.lap1[i] * pw.g2y[i] - p.b * f2 * bxy[i] - f2 * f2 * pw.g1y[i];
        dEdt[i] = pw.g1x[i] * pw.g2x[i] + pw.g1y[i] * pw.g2y[i] + p.a * pw.lap1[i] * lap2[i] + f2 * r2[i] +
                  p.b * (pw.g2x[i] * rx[i] + pw.g2y[i] * ry[i]);
    }
    const ComplexVec fxs = fwd(g, Fx), fys = fwd(g, Fy);
    ComplexVec div(fxs.size());
    for (std::size_t m = 0; m < div.size(); ++m) div[m] = cplx(0.0, w.kx[m]) * fxs[m] + cplx(0.0, w.ky[m]) * fys[m];
    const RealVec dv = to_phys(g, div);
    double res = 0.0, en = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        res += (dEdt[i] - dv[i]) * (dEdt[i] - dv[i]);
        en += E[i] * E[i];
    }
    const double da = g.dx() * g.dy();
    out.residual = std::sqrt(res * da);
    out.density_norm = std::sqrt(en * da);
    return out;
}

VirialValue virial_weighted_energy(const FieldPair& state, const PhysParams& p, double alpha, double c1, double t,
                                   double frame_speed) {
    if (!(alpha > 0.0)) throw std::invalid_argument("virial_weighted_energy: alpha must be positive");
    const Grid2D& g = state.grid();
    const RealVec e = density(pointwise(state), p);
    const double Lx = g.Lx();
    const double xc = (c1 - frame_speed) * t;
    double val = 0.0, tot = 0.0, seam = 0.0;
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < g.Nx(); ++j) {
            double xr = g.x(j) - xc;
            xr -= Lx * std::floor((xr + 0.5 * Lx) / Lx);
            const double v = e[std::size_t(k) * g.Nx() + j];
            val += (1.0 + std::tanh(alpha * xr)) * v;
            tot += std::abs(v);
            if (std::abs(xr) > 0.45 * Lx) seam += std::abs(v);
        }
    VirialValue out;
    out.value = val * g.dx() * g.dy();
    out.seam_fraction = tot > 0.0 ? seam / tot : 0.0;
    out.seam_ok = out.seam_fraction <= 1e-8;
    return out;
}

DispersionReport dispersion_check(const PhysParams& p, const Grid2D& g) {
    if (!(p.b > p.a)) throw std::invalid_argument("dispersion_check: requires b > a");
    DispersionReport r;
    r.min_D_eig = std::numeric_limits<double>::infinity();
    for (double xi : g.xi())
        for (double et : g.eta()) {
            const double k2 = xi * xi + et * et;
            if (k2 == 0.0) {
                r.max_grad = std::max(r.max_grad, 1.0);
                r.min_D_eig = std::min(r.min_D_eig, 1.0);
                continue;
            }
            const double s = std::sqrt(k2);
            const double f = std::sqrt((1.0 + p.a * k2) / (1.0 + p.b * k2));
            const double dw = f + k2 * (p.a - p.b) / ((1.0 + p.b * k2) * (1.0 + p.b * k2) * f);
            const double gx = dw * xi / s, gy = dw * et / s;
            r.max_grad = std::max(r.max_grad, std::hypot(gx, gy));
            r.max_cross = std::max(r.max_cross, std::abs(gx * et - gy * xi));
            const double d = (1.0 + p.a * k2) / (1.0 + p.b * k2) * xi / s + p.a * xi * s;
            const double A = 1.0 + p.a * k2, B = 1.0 + p.b * k2;
            const double lmin = 0.5 * (A + B - std::sqrt((A - B) * (A - B) + 4.0 * d * d));
            r.min_D_eig = std::min(r.min_D_eig, lmin);
        }
    r.pass = r.max_grad <= 1.0 + 1e-12 && r.max_cross <= 1e-12 && r.min_D_eig >= -1e-12;
    return r;
}

void EnergyLedger::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "t,E,I,flux_residual\n" << std::setprecision(17);
    for (std::size_t i = 0; i < t.size(); ++i) f << t[i] << ',' << E[i] << ',' << I[i] << ',' << flux_residual[i] << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

double dt_max(const FieldPair& s, const PhysParams& p) {
    const Pointwise pw = pointwise(s);
    double m2 = 0, ml = 0, mg1 = 0, mg2 = 0;
    for (std::size_t i = 0; i < pw.f2.size(); ++i) {
        m2 = std::max(m2, std::abs(pw.f2[i]));
        ml = std::max(ml, std::abs(pw.lap1[i]));
        mg1 = std::max(mg1, std::hypot(pw.g1x[i], pw.g1y[i]));
        mg2 = std::max(mg2, std::hypot(pw.g2x[i], pw.g2y[i]));
    }
    const Waves w(s.grid());
    double k2b = 0, kb = 0;
    for (double k2 : w.k2) {
        k2b = std::max(k2b, k2 / (1.0 + p.b * k2));
        kb = std::max(kb, std::sqrt(k2) / (1.0 + p.b * k2));
    }
    const double rad = m2 * k2b + ml + 2.0 * (mg1 + mg2) * kb;
    return rad > 0.0 ? 2.8 / rad : std::numeric_limits<double>::infinity();
}

EvolutionResult evolve(const FieldPair& init, const PhysParams& p, const EvolutionConfig& cfg,
                       const SnapshotObserver& observer, bool ledger_flux) {
    const Stepper st(init.grid(), p, cfg);
    if (cfg.nonlinear && cfg.dt > dt_max(init, p))
        throw std::invalid_argument("evolve: dt exceeds the explicit stability bound " + std::to_string(dt_max(init, p)));
    Stepper::Spec u = st.to_spec(init);
    EvolutionResult res{init, {}};
    auto record = [&](double t, int n) {
        const FieldPair s = st.from_spec(u);
        res.ledger.t.push_back(t);
        res.ledger.E.push_back(st.energy_spec(u));
        res.ledger.I.push_back(virial_weighted_energy(s, p, cfg.virial_alpha, cfg.virial_c1, t, cfg.frame_speed).value);
        res.ledger.flux_residual.push_back(ledger_flux ? energy_density_flux(s, p).residual : 0.0);
        if (observer) observer(t, n, s);
    };
    const int steps = cfg.steps();
    record(0.0, 0);
    double e_prev = st.energy_spec(u);
    for (int n = 1; n <= steps; ++n) {
        st.step_spec(u);
        const double e = st.energy_spec(u);
        if (!std::isfinite(e)) throw std::runtime_error("evolve: non-finite energy at step " + std::to_string(n));
        if (std::abs(e - e_prev) > cfg.max_energy_jump * std::abs(e_prev) && std::abs(e_prev) > 1e-300)
            throw std::runtime_error("evolve: energy jumped by more than " + std::to_string(cfg.max_energy_jump) +
                                     " in one step at step " + std::to_string(n));
        e_prev = e;
        if (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) record(n * cfg.dt, n);
    }
    res.state = st.from_spec(u);
    return res;
}

}  // namespace blwave
