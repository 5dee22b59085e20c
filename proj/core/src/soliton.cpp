#include "blwave/soliton.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace blwave {

namespace {

using PJet = Jet<2, 5>;

struct Shape {
    PJet alpha, beta, amp;
};

template <class J>
J make_amp(const J& c) {
    return (c * c - 1.0) * jet_reciprocal(c);
}

template <class J>
J make_alpha(const J& c, const PhysParams& p) {
    return jet_sqrt((c * c - 1.0) * jet_reciprocal(c * c * p.b - p.a));
}

}  // namespace

SolitonProfile::SolitonProfile(const PhysParams& p, double c) : p_(p), c_(c) {
    p_.validate();
    if (!(std::abs(c) > 1.0) || !std::isfinite(c))
        throw std::invalid_argument("soliton_profile: require |c| > 1 (got " + std::to_string(c) + ")");
    if (!(p_.b * c * c - p_.a > 0.0)) throw std::invalid_argument("soliton_profile: bc^2-a must be positive");
    using CJet = Jet<2, 0>;
    const CJet cj = CJet::var_c(c);
    const CJet al = make_alpha(cj, p_);
    const CJet am = make_amp(cj);
    const CJet be = am * jet_reciprocal(al) * 2.0;
    alpha_ = al.value();
    amp_ = am.value();
    beta_ = be.value();
    for (int i = 0; i < 3; ++i) beta_d_[i] = be.deriv(i, 0);
}

SolitonProfile soliton_profile(const PhysParams& p, double c) { return SolitonProfile(p, c); }

double SolitonProfile::phi(double z) const {
    const double u = 0.5 * alpha_ * z;
    const double e = std::exp(-2.0 * std::abs(u));
    const double tm1 = u >= 0.0 ? -2.0 * e / (1.0 + e) : std::tanh(u) - 1.0;
    return beta_ * tm1;
}

double SolitonProfile::q(double z) const {
    const double e = std::exp(-alpha_ * std::abs(z));
    return amp_ * 4.0 * e / ((1.0 + e) * (1.0 + e));
}

ProfilePoint SolitonProfile::point(double z) const {
    const PJet cj = PJet::var_c(c_);
    const PJet zj = PJet::var_z(z);
    const PJet al = make_alpha(cj, p_);
    const PJet be = make_amp(cj) * jet_reciprocal(al) * 2.0;
    const PJet u = al * zj * 0.5;
    const PJet th = PJet::compose(u, tanh_derivatives<PJet::K>(u.value(), true));
    const PJet ph = be * th;
    ProfilePoint pt;
    pt.c = c_;
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 5; ++j) pt.d[i][j] = ph.deriv(i, j);
    return pt;
}

double SolitonProfile::qc_residual(double z) const {
    const ProfilePoint pt = point(z);
    const double q = pt.phi(0, 1), qpp = pt.phi(0, 3);
    return (p_.b * c_ * c_ - p_.a) * qpp - (c_ * c_ - 1.0) * q + 1.5 * c_ * q * q;
}

FieldPair line_wave_field(const Grid2D& g, const SolitonProfile& prof, double theta, double gamma,
                          double t, double seam_tol) {
    const double ct = std::cos(theta), st = std::sin(theta);
    auto s = [&](double x, double y) { return x * ct + y * st - prof.c() * t + gamma; };
    const double hx = 0.5 * g.Lx(), hy = 0.5 * g.Ly();
    const double gx = (prof.phi(s(hx, 0.0)) - prof.phi(s(-hx, 0.0))) / g.Lx();
    const double gy = (prof.phi(s(0.0, hy)) - prof.phi(s(0.0, -hy))) / g.Ly();
    double tail = 0.0;
    for (int k = 0; k < g.Ny(); ++k) {
        tail = std::max(tail, std::abs(prof.q(s(-hx, g.y(k)))));
        tail = std::max(tail, std::abs(prof.q(s(hx, g.y(k)))));
    }
    if (tail > seam_tol)
        throw std::runtime_error("line_wave_field: profile tail " + std::to_string(tail) +
                                 " at the x seam exceeds tolerance; enlarge Lx");
    FieldPair out(g);
    out.gx = gx;
    out.gy = gy;
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < g.Nx(); ++j) {
            const double x = g.x(j), y = g.y(k), sv = s(x, y);
            out.phi1(j, k) = prof.phi(sv) - gx * x - gy * y;
            out.phi2(j, k) = prof.r(sv);
        }
    return out;
}

namespace {

// 64-point Gauss-Legendre nodes and weights on [-1,1], computed once by Newton.
struct GaussLegendre {
    static constexpr int n = 64;
    std::array<double, n> x{}, w{};
    GaussLegendre() {
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) {
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                    break;
                }
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
            }
        }
    }
};

const GaussLegendre& gl() {
    static const GaussLegendre g;
    return g;
}

// Under x = tanh(u) the bump integrand becomes exp(-cosh^2 u) sech^2 u, which
// is analytic and negligible beyond |u| = 4.
constexpr double kUmax = 4.0;

double bump_integral_u(double u0, double u1) {
    if (u1 <= u0) return 0.0;
    const auto& q = gl();
    const double m = 0.5 * (u0 + u1), h = 0.5 * (u1 - u0);
    double s = 0.0;
    for (int i = 0; i < GaussLegendre::n; ++i) {
        const double u = m + h * q.x[i];
        const double ch = std::cosh(u);
        s += q.w[i] * std::exp(-ch * ch) / (ch * ch);
    }
    return s * h;
}

double raw_mass() {
    // Split at 0 so each panel sees a single hump flank.
    return bump_integral_u(-kUmax, 0.0) + bump_integral_u(0.0, kUmax);
}

}  // namespace

double mollifier_constant() {
    static const double C = 1.0 / raw_mass();
    return C;
}

double mollifier(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return mollifier_constant() * std::exp(-1.0 / (1.0 - x * x));
}

double mollifier_tail(double x) {
    if (x >= 1.0) return 0.0;
    if (x <= -1.0) return 1.0;
    const double u = std::atanh(x);
    if (u <= -kUmax) return 1.0;
    if (u >= kUmax) return 0.0;
    if (u < 0.0)
        return mollifier_constant() * (bump_integral_u(u, 0.0) + bump_integral_u(0.0, kUmax));
    return mollifier_constant() * bump_integral_u(u, kUmax);
}

PsiCorrection::PsiCorrection(const PhysParams& p, double c0, double c, double h)
    : c0_(c0), c_(c), h_(h) {
    if (!(h >= 0.0)) throw std::invalid_argument("psi_correction: h must be nonnegative");
    const SolitonProfile s0(p, c0), s(p, c);
    amp_ = 2.0 * (s0.beta() - s.beta());
    dbeta_ = s.beta_derivs()[1];
}

double PsiCorrection::dc_psi_tilde(double z1) const { return -2.0 * dbeta_ * mollifier_tail(z1); }

PsiCorrection psi_correction(const PhysParams& p, double c0, double c, double h) {
    return PsiCorrection(p, c0, c, h);
}

}  // namespace blwave
