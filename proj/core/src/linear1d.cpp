#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "blwave/linear1d.hpp"

namespace blwave {

double Grid1D::k(int j) const { return std::numbers::pi * Grid2D::signed_index(j, N) / L; }

Grid1D make_grid1d(double L, int N, double alpha) {
    if (!(L > 0.0)) throw std::invalid_argument("Grid1D: L must be positive");
    if (N < 8 || N % 2 != 0) throw std::invalid_argument("Grid1D: N must be even and >= 8");
    if (!(alpha >= 0.0)) throw std::invalid_argument("Grid1D: alpha must be nonnegative");
    return Grid1D{L, N, alpha};
}

Grid1D default_grid1d(const PhysParams& p, double c, double alpha, int N) {
    const SolitonProfile s(p, c);
    const double a = alpha < 0.0 ? 0.5 * s.alpha() : alpha;
    // Weighted zeta_2 jumps by about exp(-alpha L) at the seam and c d/dz
    // amplifies the jump by k_max; 2.4 keeps both below 1e-8 at alpha_c/2.
    const double L = 2.4 * std::log(1e10) / s.alpha();
    return make_grid1d(L, N, a);
}

void check_grid1d(const Grid1D& g, const SolitonProfile& s) {
    if (std::exp(-s.alpha() * g.L) > 1e-10)
        throw std::invalid_argument("Grid1D: exp(-alpha_c L) exceeds 1e-10; enlarge L");
    if (!(g.alpha > 0.0) || !(g.alpha < s.alpha()))
        throw std::invalid_argument("Grid1D: weight rate must satisfy 0 < alpha < alpha_c (alpha_c = " +
                                    std::to_string(s.alpha()) + ")");
}

double VectorPair1D::norm(const Grid1D& g, double rate) const {
    double s = 0.0;
    for (int j = 0; j < size(); ++j) {
        const double w = rate == 0.0 ? 1.0 : std::exp(2.0 * rate * g.z(j));
        s += (std::norm(u1[j]) + std::norm(u2[j])) * w;
    }
    return std::sqrt(s * g.dz());
}

cplx pairing(const VectorPair1D& f, const VectorPair1D& g, const Grid1D& grid) {
    cplx s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += f.u1[j] * std::conj(g.u1[j]) + f.u2[j] * std::conj(g.u2[j]);
    return s * grid.dz();
}

VectorPair1D weighted(const VectorPair1D& f, const Grid1D& g, double rate) {
    VectorPair1D out = f;
    for (int j = 0; j < f.size(); ++j) {
        const double w = std::exp(rate * g.z(j));
        out.u1[j] *= w;
        out.u2[j] *= w;
    }
    return out;
}

CVec symbol_table(const Grid1D& g, const std::function<cplx(double)>& m) {
    CVec t(g.N);
    for (int j = 0; j < g.N; ++j) {
        const int jm = (g.N - j) % g.N;
        t[j] = 0.5 * (m(g.k(j)) + std::conj(m(g.k(jm))));
    }
    return t;
}

namespace {

CVec apply_table(const CVec& u, const CVec& t) {
    const auto plan = fft1d_plan(int(u.size()));
    ComplexVec in(u.begin(), u.end()), s;
    plan->forward(in, s);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] *= t[j];
    ComplexVec out;
    plan->inverse(s, out);
    return CVec(out.begin(), out.end());
}

std::vector<double> apply_table_real(const std::vector<double>& u, const CVec& t) {
    const CVec r = apply_table(CVec(u.begin(), u.end()), t);
    std::vector<double> out(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) out[j] = r[j].real();
    return out;
}

Eigen::MatrixXd circulant(const CVec& t) {
    const int n = int(t.size());
    const auto plan = fft1d_plan(n);
    ComplexVec in(t.begin(), t.end()), col;
    plan->inverse(in, col);
    Eigen::MatrixXd C(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) C(j, l) = col[(j - l + n) % n].real();
    return C;
}

}  // namespace

CVec apply_symbol(const CVec& u, const Grid1D& g, const std::function<cplx(double)>& m) {
    if (int(u.size()) != g.N) throw std::invalid_argument("apply_symbol: size mismatch");
    return apply_table(u, symbol_table(g, m));
}

ProfileSamples sample_profile(const SolitonProfile& s, const Grid1D& g) {
    ProfileSamples ps;
    ps.c = s.c();
    ps.beta = s.beta_derivs();
    ps.pts.reserve(g.N);
    for (int j = 0; j < g.N; ++j) ps.pts.push_back(s.point(g.z(j)));
    return ps;
}

LinearizedOperator::LinearizedOperator(const PhysParams& p, double c, double eta, const Grid1D& g,
                                       bool with_potential)
    : p_(p), c_(c), eta_(eta), g_(g) {
    const SolitonProfile s(p, c);
    if (g.alpha >= s.alpha())
        throw std::invalid_argument("build_linearized: alpha must be below alpha_c = " + std::to_string(s.alpha()));
    const double al = g.alpha, e2 = eta * eta;
    auto sym = [al](double k) { return cplx(-al, k); };
    s_ = symbol_table(g, sym);
    lsym_ = symbol_table(g, [&](double k) {
        const cplx sk = sym(k), s2 = sk * sk;
        const cplx A = 1.0 + p.a * e2 - p.a * s2, B = 1.0 + p.b * e2 - p.b * s2;
        return A * (s2 - e2) / B;
    });
    binv_ = symbol_table(g, [&](double k) {
        const cplx sk = sym(k);
        return 1.0 / (1.0 + p.b * e2 - p.b * sk * sk);
    });
    q_.resize(g.N);
    qp_.resize(g.N);
    r_.resize(g.N);
    rp_.resize(g.N);
    for (int j = 0; j < g.N; ++j) {
        const ProfilePoint pt = with_potential ? s.point(g.z(j)) : ProfilePoint{};
        q_[j] = pt.phi(0, 1);
        qp_[j] = pt.phi(0, 2);
        r_[j] = pt.r(0, 0);
        rp_[j] = pt.r(0, 1);
    }
}

VectorPair1D LinearizedOperator::apply(const VectorPair1D& u) const {
    const int n = g_.N;
    const CVec s2 = [&] {
        CVec t(n);
        for (int j = 0; j < n; ++j) {
            // The square of the symmetrized first-order symbol differs from the
            // symmetrized square only at the Nyquist mode; dense() uses the same.
            t[j] = s_[j] * s_[j];
        }
        return t;
    }();
    const CVec du1 = apply_table(u.u1, s_), du2 = apply_table(u.u2, s_);
    const CVec d2u1 = apply_table(u.u1, s2);
    const CVec lu1 = apply_table(u.u1, lsym_);
    CVec v(n);
    for (int j = 0; j < n; ++j)
        v[j] = 2.0 * rp_[j] * du1[j] + r_[j] * (d2u1[j] - eta_ * eta_ * u.u1[j]) + 2.0 * q_[j] * du2[j] +
               qp_[j] * u.u2[j];
    const CVec bv = apply_table(v, binv_);
    VectorPair1D out(n);
    for (int j = 0; j < n; ++j) {
        out.u1[j] = c_ * du1[j] + u.u2[j];
        out.u2[j] = c_ * du2[j] + lu1[j] - bv[j];
    }
    return out;
}

Eigen::MatrixXd LinearizedOperator::dense() const {
    const int n = g_.N;
    CVec s2(n);
    for (int j = 0; j < n; ++j) s2[j] = s_[j] * s_[j];
    const Eigen::MatrixXd S = circulant(s_), S2 = circulant(s2), Lm = circulant(lsym_), Bi = circulant(binv_);
    Eigen::MatrixXd V1(n, n), V2(n, n);
    for (int j = 0; j < n; ++j) {
        V1.row(j) = 2.0 * rp_[j] * S.row(j) + r_[j] * S2.row(j);
        V1(j, j) -= r_[j] * eta_ * eta_;
        V2.row(j) = 2.0 * q_[j] * S.row(j);
        V2(j, j) += qp_[j];
    }
    Eigen::MatrixXd M(2 * n, 2 * n);
    M.topLeftCorner(n, n) = c_ * S;
    M.topRightCorner(n, n).setIdentity();
    M.bottomLeftCorner(n, n) = Lm - Bi * V1;
    M.bottomRightCorner(n, n) = c_ * S - Bi * V2;
    return M;
}

Eigen::MatrixXd build_linearized(const PhysParams& p, double c, double eta, const Grid1D& g) {
    return LinearizedOperator(p, c, eta, g).dense();
}

ZetaBasis zeta_basis(const PhysParams& p, double c, const Grid1D& g) {
    const SolitonProfile s(p, c);
    const ProfileSamples ps = sample_profile(s, g);
    const double a = p.a, b = p.b, db = ps.beta[1];
    ZetaBasis zb;
    zb.z1 = zb.z2 = zb.z1s = zb.z2s = VectorPair1D(g.N);
    for (int j = 0; j < g.N; ++j) {
        const ProfilePoint& pt = ps.pts[j];
        zb.z1.u1[j] = pt.phi(0, 1);
        zb.z1.u2[j] = pt.r(0, 1);
        zb.z2.u1[j] = -pt.phi(1, 0);
        zb.z2.u2[j] = -pt.r(1, 0);
        const double dphis = pt.phi(1, 0) + 2.0 * db;
        const double B0dcr = pt.r(1, 0) - b * pt.r(1, 2);
        zb.z1s.u1[j] = c * (-B0dcr - 2.0 * pt.phi(0, 1) * pt.phi(1, 1) - pt.phi(0, 2) * dphis);
        zb.z1s.u2[j] = c * (dphis - b * pt.phi(1, 2));
        zb.z2s.u1[j] = pt.phi(0, 2) - a * pt.phi(0, 4);
        zb.z2s.u2[j] = -(pt.r(0, 0) - b * pt.r(0, 2));
    }
    zb.beta1 = pairing(zb.z1, zb.z1s, g).real();
    zb.beta1_alt = pairing(zb.z2, zb.z2s, g).real();
    zb.beta2 = pairing(zb.z2, zb.z1s, g).real();
    zb.cross = pairing(zb.z1, zb.z2s, g).real();
    zb.cross_normalized = std::abs(zb.cross) / (zb.z1.norm(g) * zb.z2s.norm(g));
    return zb;
}

double soliton_energy(const PhysParams& p, double c, const Grid1D& g) {
    const SolitonProfile s(p, c);
    double e = 0.0;
    for (int j = 0; j < g.N; ++j) {
        const ProfilePoint pt = s.point(g.z(j));
        const double q = pt.phi(0, 1), qp = pt.phi(0, 2), r = pt.r(0, 0), rp = pt.r(0, 1);
        e += q * q + p.a * qp * qp + r * r + p.b * rp * rp;
    }
    return 0.5 * e * g.dz();
}

namespace {

struct B0Tables {
    CVec b1, b2;
};

B0Tables b0_tables(const PhysParams& p, const Grid1D& g) {
    B0Tables t;
    t.b1 = symbol_table(g, [&](double k) { return cplx(1.0 / (1.0 + p.b * k * k)); });
    t.b2 = symbol_table(g, [&](double k) {
        const double v = 1.0 / (1.0 + p.b * k * k);
        return cplx(v * v);
    });
    return t;
}

}  // namespace

// L1(0) u1 = -u1 - (b-a)(B0^-1 + B0^-2) u1'' follows from B0^-1 A0 = u1 + (b-a) B0^-1 u1''
// applied inside B0^-1 (I - A0 - B0^-1 A0); every multiplier then sees a
// localized argument even when u1 tends to a constant.
std::vector<double> apply_L1(const PhysParams& p, const ProfileSamples& ps, const Grid1D& g, const L1Input& u) {
    const int n = g.N;
    const B0Tables t = b0_tables(p, g);
    std::vector<double> f1(n), f2(n);
    for (int j = 0; j < n; ++j) {
        const ProfilePoint& pt = ps.pts[j];
        const double q = pt.phi(0, 1), qp = pt.phi(0, 2), r = pt.r(0, 0), rp = pt.r(0, 1);
        f1[j] = r * u.u1[j];
        f2[j] = 2.0 * rp * u.u1p[j] + r * u.u1pp[j] + 2.0 * q * u.u2p[j] + qp * u.u2[j];
    }
    const std::vector<double> d1 = apply_table_real(u.u1pp, t.b1), d2 = apply_table_real(u.u1pp, t.b2);
    const std::vector<double> g1 = apply_table_real(f1, t.b1), g2 = apply_table_real(f2, t.b2);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = -u.u1[j] - (p.b - p.a) * (d1[j] + d2[j]) + g1[j] + p.b * g2[j];
    return out;
}

std::vector<double> apply_L1_dc(const PhysParams& p, const ProfileSamples& ps, const Grid1D& g, const L1Input& u,
                                const L1Input& du) {
    const int n = g.N;
    const B0Tables t = b0_tables(p, g);
    std::vector<double> out = apply_L1(p, ps, g, du);
    std::vector<double> f1(n), f2(n);
    for (int j = 0; j < n; ++j) {
        const ProfilePoint& pt = ps.pts[j];
        const double dq = pt.phi(1, 1), dqp = pt.phi(1, 2), dr = pt.r(1, 0), drp = pt.r(1, 1);
        f1[j] = dr * u.u1[j];
        f2[j] = 2.0 * drp * u.u1p[j] + dr * u.u1pp[j] + 2.0 * dq * u.u2p[j] + dqp * u.u2[j];
    }
    const std::vector<double> g1 = apply_table_real(f1, t.b1), g2 = apply_table_real(f2, t.b2);
    for (int j = 0; j < n; ++j) out[j] += g1[j] + p.b * g2[j];
    return out;
}

}  // namespace blwave
