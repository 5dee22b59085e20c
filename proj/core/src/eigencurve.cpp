#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "blwave/linear1d.hpp"

namespace blwave {

namespace {

double inf_norm(const Eigen::MatrixXd& M) { return M.cwiseAbs().rowwise().sum().maxCoeff(); }

Eigen::VectorXcd stack(const VectorPair1D& v) {
    const int n = v.size();
    Eigen::VectorXcd out(2 * n);
    for (int j = 0; j < n; ++j) {
        out[j] = v.u1[j];
        out[n + j] = v.u2[j];
    }
    return out;
}

VectorPair1D unstack(const Eigen::VectorXcd& x) {
    const int n = int(x.size()) / 2;
    VectorPair1D v(n);
    for (int j = 0; j < n; ++j) {
        v.u1[j] = x[j];
        v.u2[j] = x[n + j];
    }
    return v;
}

std::string dump(const std::vector<cplx>& vals) {
    std::ostringstream os;
    os.precision(10);
    for (const cplx& v : vals) os << ' ' << v;
    return os.str();
}

}  // namespace

EigenPair nearest_eigenpair(const Eigen::MatrixXd& M, cplx target, const EigenOptions& opt) {
    const int n = int(M.rows());
    const int p = std::min(3, n);
    const Eigen::MatrixXcd Mc = M.cast<cplx>();
    Eigen::MatrixXcd S = Mc;
    S.diagonal().array() -= target;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S);
    const double scale = std::max(1.0, inf_norm(M));

    std::mt19937_64 rng(20240917);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd X(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = cplx(nd(rng), nd(rng));

    std::vector<cplx> ritz;
    Eigen::VectorXcd v;
    cplx lam = target;
    bool converged = false;
    for (int it = 0; it < opt.max_iter && !converged; ++it) {
        const Eigen::MatrixXcd Y = lu.solve(X);
        const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
        const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, p);
        const Eigen::MatrixXcd H = Q.adjoint() * (Mc * Q);
        const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H);
        std::vector<int> order(p);
        for (int j = 0; j < p; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int l, int r) {
            return std::abs(es.eigenvalues()[l] - target) < std::abs(es.eigenvalues()[r] - target);
        });
        ritz.clear();
        for (int j : order) ritz.push_back(es.eigenvalues()[j]);
        lam = ritz[0];
        v = Q * es.eigenvectors().col(order[0]);
        v.normalize();
        converged = (Mc * v - lam * v).norm() <= opt.tol * scale;
        X = Q;
    }
    if (!converged)
        throw std::runtime_error("nearest_eigenpair: no convergence near " + dump({target}) + "; Ritz values" +
                                 dump(ritz));
    if (p > 1 && std::abs(lam - target) > opt.ambiguity_ratio * std::abs(ritz[1] - target))
        throw std::runtime_error("nearest_eigenpair: ambiguous branch near " + dump({target}) + "; Ritz values" +
                                 dump(ritz));

    // Left vector by inverse iteration on the adjoint with the same factorization.
    Eigen::VectorXcd w = v;
    bool left_ok = false;
    for (int it = 0; it < opt.max_iter && !left_ok; ++it) {
        w = lu.adjoint().solve(w);
        w.normalize();
        left_ok = (Mc.adjoint() * w - std::conj(lam) * w).norm() <= opt.tol * scale;
    }
    if (!left_ok) throw std::runtime_error("nearest_eigenpair: left vector did not converge");

    EigenPair ep;
    ep.lambda = lam;
    ep.right = v;
    ep.left = w;
    ep.second = p > 1 ? ritz[1] : cplx(std::nan(""), 0.0);
    return ep;
}

namespace {

// Coefficients of the stacked weighted vector v on zeta_1, zeta_2, with v
// normalized so that the zeta_1 coefficient is one.
void normalize_right(Eigen::VectorXcd& v, const ZetaBasis& zb, const Grid1D& g) {
    const VectorPair1D u = weighted(unstack(v), g, -g.alpha);
    const cplx p1 = pairing(u, zb.z1s, g), p2 = pairing(u, zb.z2s, g);
    const cplx x2 = p2 / zb.beta1;
    const cplx x1 = (p1 - x2 * zb.beta2) / zb.beta1;
    if (std::abs(x1) == 0.0) throw std::runtime_error("eigencurve: right vector has no zeta_1 component");
    v /= x1;
}

void normalize_left(Eigen::VectorXcd& w, const ZetaBasis& zb, const Grid1D& g) {
    const VectorPair1D u = weighted(unstack(w), g, g.alpha);
    const cplx cy1 = pairing(zb.z1, u, g) / zb.beta1;
    const cplx cy2 = (pairing(zb.z2, u, g) - cy1 * zb.beta2) / zb.beta1;
    if (std::abs(cy2) == 0.0) throw std::runtime_error("eigencurve: left vector has no zeta_2* component");
    w /= std::conj(cy2);
}

// Least squares fit y = c0 + c1 x; returns c0.
double intercept(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() == 1) return y[0];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-300) return sy / n;
    return (sy * sxx - sx * sxy) / den;
}

}  // namespace

EigenCurve eigencurve(const PhysParams& p, double c, const Grid1D& g, const std::vector<double>& etas,
                      const ModulationCoefficients& mc, const EigenOptions& opt) {
    const SolitonProfile s(p, c);
    check_grid1d(g, s);
    const ZetaBasis zb = zeta_basis(p, c, g);
    EigenCurve ec;
    std::vector<double> x, yi, yr;
    for (double eta : etas) {
        if (std::isfinite(mc.eta0) && std::abs(eta) > mc.eta0 * (1.0 + 1e-12))
            throw std::invalid_argument("eigencurve: |eta| exceeds eta0");
        ec.eta.push_back(eta);
        if (eta == 0.0) {
            ec.lambda.push_back(0.0);
            ec.right.push_back(stack(weighted(zb.z1, g, g.alpha)));
            ec.left.push_back(stack(weighted(zb.z2s, g, -g.alpha)));
            continue;
        }
        const Eigen::MatrixXd M = build_linearized(p, c, eta, g);
        const cplx target(-mc.lambda2 * eta * eta, mc.lambda1 * eta);
        EigenPair ep = nearest_eigenpair(M, target, opt);
        normalize_right(ep.right, zb, g);
        normalize_left(ep.left, zb, g);
        ec.lambda.push_back(ep.lambda);
        ec.right.push_back(ep.right);
        ec.left.push_back(ep.left);
        if (eta > 0.0) {
            x.push_back(eta * eta);
            yi.push_back(ep.lambda.imag() / eta);
            yr.push_back(ep.lambda.real() / (eta * eta));
        }
    }
    if (!x.empty()) {
        ec.lambda1_fit = intercept(x, yi);
        ec.lambda2_fit = -intercept(x, yr);
    }
    return ec;
}

GapReport spectral_gap_check(const PhysParams& p, double c, const Grid1D& g, double eta0,
                             const ModulationCoefficients& mc, const std::vector<double>& etas) {
    check_grid1d(g, SolitonProfile(p, c));
    GapReport rep;
    rep.max_re_outside_band = -std::numeric_limits<double>::infinity();
    rep.max_re_undeflated = -std::numeric_limits<double>::infinity();
    for (double eta : etas) {
        const Eigen::MatrixXd M = build_linearized(p, c, eta, g);
        const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
        if (es.info() != Eigen::Success) throw std::runtime_error("spectral_gap_check: eigensolve failed");
        std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        for (const cplx& l : ev) rep.max_re_undeflated = std::max(rep.max_re_undeflated, l.real());
        if (std::abs(eta) <= eta0) {
            const cplx pred(-mc.lambda2 * eta * eta, mc.lambda1 * std::abs(eta));
            for (const cplx t : {pred, std::conj(pred)}) {
                auto it = std::min_element(ev.begin(), ev.end(), [&](const cplx& l, const cplx& r) {
                    return std::abs(l - t) < std::abs(r - t);
                });
                ev.erase(it);
            }
        }
        double mx = -std::numeric_limits<double>::infinity();
        for (const cplx& l : ev) mx = std::max(mx, l.real());
        rep.eta.push_back(eta);
        rep.max_re_per_eta.push_back(mx);
        rep.max_re_outside_band = std::max(rep.max_re_outside_band, mx);
    }
    rep.pass = rep.max_re_outside_band < 0.0;
    return rep;
}

ProjectionPair projection_pair(const PhysParams& p, double c, double eta, const Grid1D& g,
                               const ModulationCoefficients& mc, const EigenOptions& opt) {
    const ZetaBasis zb = zeta_basis(p, c, g);
    const double b1 = zb.beta1, b2 = zb.beta2;
    ProjectionPair pp;
    pp.eta = eta;
    const int n = g.N;
    pp.g1 = pp.g2 = pp.g1s = pp.g2s = VectorPair1D(n);
    const VectorPair1D z1 = weighted(zb.z1, g, g.alpha), z2 = weighted(zb.z2, g, g.alpha);
    const VectorPair1D z1s = weighted(zb.z1s, g, -g.alpha), z2s = weighted(zb.z2s, g, -g.alpha);

    // Below this |eta| the normalization kappa is dominated by solver noise.
    const double eta_min = 1e-6;
    if (std::abs(eta) < eta_min) {
        pp.fallback = true;
        for (int j = 0; j < n; ++j) {
            pp.g1.u1[j] = z1.u1[j] / b1;
            pp.g1.u2[j] = z1.u2[j] / b1;
            pp.g2.u1[j] = z2.u1[j] / b1 - b2 * z1.u1[j] / (b1 * b1);
            pp.g2.u2[j] = z2.u2[j] / b1 - b2 * z1.u2[j] / (b1 * b1);
        }
        pp.g1s = z1s;
        pp.g2s = z2s;
        pp.kappa = 0.0;
        return pp;
    }
    ModulationCoefficients mc_band = mc;
    mc_band.eta0 = std::numeric_limits<double>::infinity();
    const EigenCurve ec = eigencurve(p, c, g, {eta}, mc_band, opt);
    const VectorPair1D zeta = unstack(ec.right[0]), zs = unstack(ec.left[0]);
    const cplx w = pairing(zeta, zs, g);
    if (std::abs(w.imag()) < 1e-14 * std::abs(w) || w.imag() == 0.0)
        throw std::runtime_error("projection_pair: ill-conditioned normalization (Im <zeta, zeta*> ~ 0)");
    const cplx fac = cplx(0.0, 1.0) * std::conj(w) / w.imag();
    VectorPair1D gg(n);
    for (int j = 0; j < n; ++j) {
        gg.u1[j] = fac * zeta.u1[j];
        gg.u2[j] = fac * zeta.u2[j];
    }
    const double kappa = 0.5 * pairing(gg, zs, g).imag();
    if (!(std::abs(kappa) > 1e-14)) throw std::runtime_error("projection_pair: kappa near zero");
    pp.kappa = kappa;
    for (int j = 0; j < n; ++j) {
        pp.g1.u1[j] = gg.u1[j].real() / b1;
        pp.g1.u2[j] = gg.u2[j].real() / b1;
        pp.g2.u1[j] = gg.u1[j].imag() / kappa;
        pp.g2.u2[j] = gg.u2[j].imag() / kappa;
        pp.g1s.u1[j] = -(b1 / kappa) * zs.u1[j].imag();
        pp.g1s.u2[j] = -(b1 / kappa) * zs.u2[j].imag();
        pp.g2s.u1[j] = zs.u1[j].real();
        pp.g2s.u2[j] = zs.u2[j].real();
    }
    // <Im g, Im g*> vanishes only up to eps |M| / (lambda1 eta) and is then
    // scaled by 1/kappa^2; a 2x2 Gram correction of g* restores biorthogonality.
    Eigen::Matrix2d P;
    const VectorPair1D* gs[2] = {&pp.g1, &pp.g2};
    VectorPair1D* hs[2] = {&pp.g1s, &pp.g2s};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) P(a, b) = pairing(*gs[a], *hs[b], g).real();
    const Eigen::Matrix2d Q = P.inverse().transpose();
    const VectorPair1D h1 = pp.g1s, h2 = pp.g2s;
    for (int j = 0; j < n; ++j) {
        pp.g1s.u1[j] = Q(0, 0) * h1.u1[j] + Q(0, 1) * h2.u1[j];
        pp.g1s.u2[j] = Q(0, 0) * h1.u2[j] + Q(0, 1) * h2.u2[j];
        pp.g2s.u1[j] = Q(1, 0) * h1.u1[j] + Q(1, 1) * h2.u1[j];
        pp.g2s.u2[j] = Q(1, 0) * h1.u2[j] + Q(1, 1) * h2.u2[j];
    }
    return pp;
}

}  // namespace blwave
