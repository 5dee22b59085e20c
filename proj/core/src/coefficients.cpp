#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "blwave/linear1d.hpp"

namespace blwave {

namespace {

double pair2(const std::vector<double>& v, const VectorPair1D& s, const Grid1D& g) {
    double acc = 0.0;
    for (int j = 0; j < g.N; ++j) acc += v[j] * s.u2[j].real();
    return acc * g.dz();
}

std::vector<double> real_part(const CVec& v) {
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j].real();
    return out;
}

std::vector<double> b0inv(const PhysParams& p, const Grid1D& g, const std::vector<double>& f) {
    return real_part(apply_symbol(CVec(f.begin(), f.end()), g, [&](double k) { return cplx(1.0 / (1.0 + p.b * k * k)); }));
}

// Inputs of L1 for zeta1, zeta2 and their c-derivatives, from profile jets.
L1Input l1_input(const ProfileSamples& ps, int ic, double sign) {
    L1Input u;
    const std::size_t n = ps.pts.size();
    u.u1.resize(n);
    u.u1p.resize(n);
    u.u1pp.resize(n);
    u.u2.resize(n);
    u.u2p.resize(n);
    // zeta1 family: (phi_z, r_z) differentiated ic times in c; zeta2 family: -(phi_c, r_c).
    const int jz = sign > 0 ? 1 : 0;
    const int i = sign > 0 ? ic : ic + 1;
    for (std::size_t j = 0; j < n; ++j) {
        const ProfilePoint& pt = ps.pts[j];
        u.u1[j] = sign * pt.phi(i, jz);
        u.u1p[j] = sign * pt.phi(i, jz + 1);
        u.u1pp[j] = sign * pt.phi(i, jz + 2);
        u.u2[j] = sign * pt.r(i, jz);
        u.u2p[j] = sign * pt.r(i, jz + 1);
    }
    return u;
}

}  // namespace

RawCoefficients raw_coefficients(const PhysParams& p, double c, const Grid1D& g) {
    const SolitonProfile s(p, c);
    const ProfileSamples ps = sample_profile(s, g);
    const ZetaBasis zb = zeta_basis(p, c, g);
    const int n = g.N;

    const L1Input z1 = l1_input(ps, 0, 1.0), z2 = l1_input(ps, 0, -1.0);
    const L1Input dz1 = l1_input(ps, 1, 1.0), dz2 = l1_input(ps, 1, -1.0);
    const std::vector<double> l1z1 = apply_L1(p, ps, g, z1), l1z2 = apply_L1(p, ps, g, z2);

    std::vector<double> f3(n), f4(n), f5(n);
    for (int j = 0; j < n; ++j) {
        const ProfilePoint& pt = ps.pts[j];
        f3[j] = pt.r(0, 1) * pt.phi(1, 0);
        f4[j] = pt.r(1, 0) * pt.phi(1, 0);
        f5[j] = pt.r(0, 1) * pt.phi(0, 1);
    }
    const std::vector<double> b3 = b0inv(p, g, f3), b4 = b0inv(p, g, f4), b5 = b0inv(p, g, f5);
    std::vector<double> phi3 = apply_L1_dc(p, ps, g, z1, dz1);
    std::vector<double> phi4 = apply_L1_dc(p, ps, g, z2, dz2);
    const std::vector<double> dl1z1 =
        real_part(apply_symbol(CVec(l1z1.begin(), l1z1.end()), g, [](double k) { return cplx(0.0, k); }));
    std::vector<double> phi5(n);
    for (int j = 0; j < n; ++j) {
        phi3[j] += b3[j];
        phi4[j] -= b4[j];
        phi5[j] = -dl1z1[j] - b5[j];
    }

    RawCoefficients rc{};
    rc.beta1 = zb.beta1;
    rc.beta2 = zb.beta2;
    const std::vector<double>* cols[5] = {&l1z1, &l1z2, &phi3, &phi4, &phi5};
    for (int jj = 0; jj < 5; ++jj) {
        rc.m[0][jj] = pair2(*cols[jj], zb.z1s, g);
        rc.m[1][jj] = pair2(*cols[jj], zb.z2s, g);
    }
    for (int jj = 0; jj < 5; ++jj) {
        rc.A[0][jj] = (rc.beta2 * rc.m[1][jj] - rc.beta1 * rc.m[0][jj]) / (rc.beta1 * rc.beta1);
        rc.A[1][jj] = -rc.m[1][jj] / rc.beta1;
    }
    return rc;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 30);
}

}  // namespace

double RhoFunction::a21(double c) const { return raw_coefficients(p, c, grid).A[1][0]; }
double RhoFunction::a23(double c) const { return raw_coefficients(p, c, grid).A[1][2]; }

double RhoFunction::rho_prime(double c) const {
    auto integrand = [this](double s) {
        const RawCoefficients rc = raw_coefficients(p, s, grid);
        return 2.0 * rc.A[1][2] / rc.A[1][0];
    };
    const double expo = adaptive_simpson(integrand, c0, c, tol);
    return a21(c0) * std::exp(expo) / a21(c);
}

double RhoFunction::rho(double c) const {
    return adaptive_simpson([this](double s) { return rho_prime(s); }, c0, c, tol);
}

double RhoFunction::rho_pp_richardson(double h) const {
    auto d = [this](double step) { return (rho_prime(c0 + step) - rho_prime(c0 - step)) / (2.0 * step); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

double default_eta0(double lambda1, double nu) {
    if (nu == 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * lambda1 / std::abs(nu);
}

namespace {

// m21 through second differences in eta of the full weighted-free operator.
double m21_by_eta(const PhysParams& p, double c, const Grid1D& g, const ZetaBasis& zb) {
    Grid1D g0 = g;
    g0.alpha = 0.0;
    const VectorPair1D base = LinearizedOperator(p, c, 0.0, g0).apply(zb.z1);
    auto D = [&](double h) {
        const VectorPair1D v = LinearizedOperator(p, c, h, g0).apply(zb.z1);
        VectorPair1D d(g.N);
        for (int j = 0; j < g.N; ++j) {
            d.u1[j] = (v.u1[j] - base.u1[j]) / (h * h);
            d.u2[j] = (v.u2[j] - base.u2[j]) / (h * h);
        }
        return pairing(d, zb.z2s, g0).real();
    };
    const double h = 1e-2;
    return (4.0 * D(h) - D(2.0 * h)) / 3.0;
}

}  // namespace

ModulationCoefficients modulation_coefficients(const PhysParams& p, double c0, const Grid1D& g,
                                               const CoefficientOptions& opt) {
    p.validate();
    const SolitonProfile s(p, c0);
    ModulationCoefficients mc;
    mc.c0 = c0;
    mc.a = p.a;
    mc.b = p.b;
    mc.alpha = opt.alpha > 0.0 ? opt.alpha : (g.alpha > 0.0 ? g.alpha : 0.5 * s.alpha());

    const RawCoefficients rc = raw_coefficients(p, c0, g);
    mc.beta1 = rc.beta1;
    mc.beta2 = rc.beta2;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 5; ++j) {
            mc.m[k][j] = rc.m[k][j];
            mc.A[k][j] = rc.A[k][j];
        }
    const double b1 = mc.beta1, b2 = mc.beta2;
    const double l1sq = -mc.m[1][0] / b1;
    mc.lambda2 = (mc.m[1][0] * b2 - b1 * (mc.m[0][0] + mc.m[1][1])) / (2.0 * b1 * b1);
    mc.nu = 0.5 * (mc.A[0][0] - mc.A[1][1]);

    if (opt.check_signs) {
        std::ostringstream why;
        if (!(b1 > 0.0)) why << " beta1=" << b1;
        if (!(b2 > 0.0)) why << " beta2=" << b2;
        if (!(l1sq > 0.0)) why << " lambda1^2=" << l1sq;
        if (!(mc.lambda2 > 0.0)) why << " lambda2=" << mc.lambda2;
        if (!(mc.m[0][0] < 0.0)) why << " m11=" << mc.m[0][0];
        if (!why.str().empty())
            throw std::runtime_error("modulation_coefficients: sign condition violated at c0=" + std::to_string(c0) +
                                     ":" + why.str());
    }
    mc.lambda1 = std::sqrt(std::max(l1sq, 0.0));

    const ZetaBasis zb = zeta_basis(p, c0, g);
    mc.m21_eta_path = m21_by_eta(p, c0, g, zb);

    const RhoFunction rho{p, c0, g};
    mc.rho_pp = rho.rho_pp_richardson(opt.rho_step);
    mc.p1 = -0.5 * mc.rho_pp;
    mc.p3 = 0.5 * (l1sq * mc.p1 + mc.A[0][4] + 2.0 * mc.A[1][2]);

    {
        const double h = std::min(1e-3, 0.1 * (c0 - 1.0));
        const RawCoefficients up = raw_coefficients(p, c0 + h, g), dn = raw_coefficients(p, c0 - h, g);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 5; ++j) mc.dA[i][j] = (up.A[i][j] - dn.A[i][j]) / (2.0 * h);
    }

    if (opt.eta0 > 0.0) {
        mc.eta0 = opt.eta0;
    } else {
        double e = default_eta0(mc.lambda1, mc.nu);
        if (opt.eta0_cap > 0.0) e = std::min(e, opt.eta0_cap);
        if (opt.check_branch && std::isfinite(e)) {
            for (int it = 0;; ++it) {
                try {
                    nearest_eigenpair(build_linearized(p, c0, e, g), cplx(-mc.lambda2 * e * e, mc.lambda1 * e));
                    break;
                } catch (const std::runtime_error&) {
                    if (it >= 20) throw;
                    e *= 0.8;
                }
            }
        }
        mc.eta0 = e;
    }
    if (std::isfinite(mc.eta0) && !(std::abs(mc.nu) * mc.eta0 < mc.lambda1))
        throw std::runtime_error("modulation_coefficients: |nu| eta0 >= lambda1");
    return mc;
}

std::string ModulationCoefficients::report() const {
    std::ostringstream os;
    os.precision(17);
    os << "c0=" << c0 << "\na=" << a << "\nb=" << b << "\nalpha=" << alpha << "\nbeta1=" << beta1
       << "\nbeta2=" << beta2 << '\n';
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 5; ++j) os << "m" << k + 1 << j + 1 << '=' << m[k][j] << '\n';
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 5; ++j) os << "a" << k + 1 << j + 1 << '=' << A[k][j] << '\n';
    os << "lambda1=" << lambda1 << "\nlambda2=" << lambda2 << "\nnu=" << nu << "\nrho_pp=" << rho_pp
       << "\np1=" << p1 << "\np3=" << p3 << "\neta0=" << eta0 << "\nm21_eta_path=" << m21_eta_path << '\n';
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) os << "da" << k + 1 << j + 1 << '=' << dA[k][j] << '\n';
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) os << "da" << k + 1 << j + 1 << '=' << dA[k][j] << '\n';
    return os.str();
}

}  // namespace blwave
