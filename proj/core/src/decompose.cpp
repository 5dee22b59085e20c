#include "blwave/decompose.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "blwave/parallel.hpp"

namespace blwave {

EvolutionResult evolve_free_reference(const FieldPair& U0, const PhysParams& p, double c0,
                                      const EvolutionConfig& cfg, const SnapshotObserver& observer) {
    EvolutionConfig c = cfg;
    c.frame_speed = c0;
    return evolve(U0, p, c, observer);
}

namespace {

// Spectrum of n1 real samples zero-padded to nf modes, scaled so that the
// inverse transform of length nf returns the interpolated samples.
ComplexVec upsample_spectrum(const CVec& v, int nf) {
    const int n1 = int(v.size());
    ComplexVec in(n1), out(n1);
    for (int j = 0; j < n1; ++j) in[j] = v[j].real();
    fft1d_plan(n1)->forward(in, out);
    ComplexVec s(nf, 0.0);
    const double scale = double(nf) / n1;
    for (int j = 0; j < n1 / 2; ++j) s[j] = scale * out[j];
    for (int j = n1 / 2 + 1; j < n1; ++j) s[nf - n1 + j] = scale * out[j];
    return s;
}

}  // namespace

ProjectionTable::ProjectionTable(const PhysParams& p, const ModulationCoefficients& mc, const Grid2D& g,
                                 const DecompositionOptions& opt)
    : p_(p), mc_(mc), g_(g), opt_(opt) {
    alpha_ = opt.alpha > 0.0 ? opt.alpha : mc.alpha;
    eta0_ = opt.eta0 > 0.0 ? opt.eta0 : mc.eta0;
    if (!(opt.h >= 0.0)) throw std::invalid_argument("ProjectionTable: h must be nonnegative");
    if (!(opt.dc > 0.0)) throw std::invalid_argument("ProjectionTable: dc must be positive");
    const double dx = g.dx();
    int r = std::max(1, int(std::floor(opt.dz_max / dx)));
    while (r > 1 && g.Nx() % (2 * r) != 0) --r;
    const double l_need = std::max(default_grid1d(p, mc.c0).L, 0.5 * g.Lx() + 20.0);
    int kp = int(std::ceil((l_need - 0.5 * g.Lx()) / dx));
    kp = (kp + r - 1) / r * r;
    nf_ = g.Nx() + 2 * kp;
    offset_ = kp;
    g1_ = make_grid1d(0.5 * nf_ * dx, nf_ / r, alpha_);
    kappa_.resize(nf_);
    for (int i = 0; i < nf_; ++i) kappa_[i] = std::numbers::pi * Grid2D::signed_index(i, nf_) / (0.5 * nf_ * dx);

    for (int m = 0; m <= g.Ny() / 2 - 1; ++m) {
        const double eta = 2.0 * std::numbers::pi * m / g.Ly();
        if (!in_band(eta, eta0_)) break;
        eta_.push_back(eta);
    }
    ModulationCoefficients mcb = mc;
    mcb.eta0 = std::numeric_limits<double>::infinity();
    spec_.assign(eta_.size() * 12, {});
    for (std::size_t m = 0; m < eta_.size(); ++m) {
        std::array<ProjectionPair, 3> pp;
        const double cs[3] = {mc.c0 - opt.dc, mc.c0, mc.c0 + opt.dc};
        for (int i = 0; i < 3; ++i) pp[i] = projection_pair(p, cs[i], eta_[m], g1_, mcb);
        for (int k = 0; k < 2; ++k)
            for (int comp = 0; comp < 2; ++comp) {
                std::array<ComplexVec, 3> s;
                for (int i = 0; i < 3; ++i) {
                    const VectorPair1D& v = k == 0 ? pp[i].g1s : pp[i].g2s;
                    s[i] = upsample_spectrum(comp == 0 ? v.u1 : v.u2, nf_);
                }
                ComplexVec d1(nf_), d2(nf_);
                for (int i = 0; i < nf_; ++i) {
                    d1[i] = (s[2][i] - s[0][i]) / (2.0 * opt.dc);
                    d2[i] = (s[2][i] - 2.0 * s[1][i] + s[0][i]) / (2.0 * opt.dc * opt.dc);
                }
                const std::size_t base = ((m * 2 + k) * 2 + comp) * 3;
                spec_[base] = std::move(s[1]);
                spec_[base + 1] = std::move(d1);
                spec_[base + 2] = std::move(d2);
            }
    }
}

void ProjectionTable::evaluate(int k, int m, double shift, double ctil, std::vector<double>& u1,
                               std::vector<double>& u2) const {
    const int nx = g_.Nx();
    const auto plan = fft1d_plan(nf_);
    ComplexVec s(nf_), out(nf_);
    for (int comp = 0; comp < 2; ++comp) {
        const std::size_t base = ((std::size_t(m) * 2 + (k - 1)) * 2 + comp) * 3;
        const ComplexVec &s0 = spec_[base], &s1 = spec_[base + 1], &s2 = spec_[base + 2];
        for (int i = 0; i < nf_; ++i)
            s[i] = (s0[i] + ctil * (s1[i] + ctil * s2[i])) * std::polar(1.0, -kappa_[i] * shift);
        plan->inverse(s, out);
        std::vector<double>& u = comp == 0 ? u1 : u2;
        u.resize(nx);
        for (int j = 0; j < nx; ++j) u[j] = out[j + offset_].real() * std::exp(alpha_ * (g_.x(j) - shift));
    }
}

std::array<double, 4> jacobian_block(const ProjectionTable& tab, int m, double t) {
    const Grid2D& g = tab.grid();
    const PhysParams& p = tab.params();
    const double c0 = tab.c0();
    const SolitonProfile s0(p, c0);
    const PsiCorrection psi(p, c0, c0, tab.options().h);
    std::array<double, 4> f{};
    std::vector<double> u1, u2;
    for (int k = 1; k <= 2; ++k) {
        tab.evaluate(k, m, 0.0, 0.0, u1, u2);
        double a = 0.0, b = 0.0;
        for (int j = 0; j < g.Nx(); ++j) {
            const double x = g.x(j);
            const ProfilePoint pt = s0.point(x);
            const double dpsi = psi.dc_psi_tilde(psi.z1(x, t));
            a -= (pt.phi(1, 0) - dpsi) * u1[j] + pt.r(1, 0) * u2[j];
            b += pt.phi(0, 1) * u1[j] + pt.r(0, 1) * u2[j];
        }
        f[(k - 1) * 2] = a * g.dx();
        f[(k - 1) * 2 + 1] = b * g.dx();
    }
    return f;
}

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class Orthogonality {
public:
    Orthogonality(const FieldPair& phi, const FieldPair& U1, double t, const ProjectionTable& tab)
        : tab_(tab), g_(tab.grid()), t_(t), M_(tab.modes()), n_(2 * (2 * M_ - 1)) {
        // The sponge band (both sides of the x seam) is left out of the x
        // integrals: g* grows ahead of the wave and would amplify rounding and
        // damped seam radiation there.
        const double xin = 0.5 * g_.Lx() - tab.options().sponge_width;
        jend_ = g_.Nx();
        while (jend_ > 0 && g_.x(jend_ - 1) > xin) --jend_;
        while (jbeg_ < jend_ && g_.x(jbeg_) < -xin) ++jbeg_;
        const Field2D a = phi.phi1_physical(), b = U1.phi1_physical();
        d1_.resize(g_.size());
        d2_.resize(g_.size());
        for (std::size_t i = 0; i < g_.size(); ++i) {
            d1_[i] = a.values()[i] - b.values()[i];
            d2_[i] = phi.phi2.values()[i] - U1.phi2.values()[i];
        }
    }

    int size() const { return n_; }
    int half() const { return 2 * M_ - 1; }

    // Samples on the y-grid of the real function with band coefficients x[off..].
    std::vector<double> synth(const Eigen::VectorXd& x, int off) const {
        std::vector<double> f(g_.Ny());
        for (int l = 0; l < g_.Ny(); ++l) {
            const double y = g_.y(l);
            double v = x[off];
            for (int m = 1; m < M_; ++m) {
                const double ph = tab_.eta(m) * y;
                v += 2.0 * (x[off + 2 * m - 1] * std::cos(ph) - x[off + 2 * m] * std::sin(ph));
            }
            f[l] = v;
        }
        return f;
    }

    // U2 row l for (ctil, gamma) at that row.
    void u2_row(int l, double ct, double ga, double* o1, double* o2) const {
        const double c = tab_.c0() + ct;
        const SolitonProfile s(tab_.params(), c);
        const PsiCorrection psi(tab_.params(), tab_.c0(), c, tab_.options().h);
        const std::size_t row = std::size_t(l) * g_.Nx();
        for (int j = 0; j < g_.Nx(); ++j) {
            const double z = g_.x(j) - ga;
            o1[j] = d1_[row + j] - s.phi(z) + psi.first_component(z, t_);
            o2[j] = d2_[row + j] - s.r(z);
        }
    }

    // F_k(eta_m) as [m][k-1], and U2 when requested.
    std::vector<std::array<cplx, 2>> eval(const Eigen::VectorXd& x, FieldPair* U2 = nullptr) const {
        const auto ct = synth(x, 0), ga = synth(x, half());
        const int ny = g_.Ny();
        // Per-row x-integrals, summed over rows serially afterwards.
        std::vector<double> part(std::size_t(ny) * M_ * 2);
        parallel_for(ny, [&](std::size_t lo, std::size_t hi) {
            std::vector<double> r1(g_.Nx()), r2(g_.Nx()), w1, w2;
            for (std::size_t l = lo; l < hi; ++l) {
                u2_row(int(l), ct[l], ga[l], r1.data(), r2.data());
                if (U2)
                    for (int j = 0; j < g_.Nx(); ++j) {
                        U2->phi1(j, int(l)) = r1[j];
                        U2->phi2(j, int(l)) = r2[j];
                    }
                for (int m = 0; m < M_; ++m)
                    for (int k = 1; k <= 2; ++k) {
                        tab_.evaluate(k, m, ga[l], ct[l], w1, w2);
                        double s = 0.0;
                        for (int j = jbeg_; j < jend_; ++j) s += r1[j] * w1[j] + r2[j] * w2[j];
                        part[(l * M_ + m) * 2 + (k - 1)] = s * g_.dx();
                    }
            }
        });
        std::vector<std::array<cplx, 2>> F(M_, {cplx(0.0), cplx(0.0)});
        for (int l = 0; l < ny; ++l)
            for (int m = 0; m < M_; ++m) {
                const cplx e = std::polar(g_.dy(), -tab_.eta(m) * g_.y(l));
                for (int k = 0; k < 2; ++k) F[m][k] += e * part[(std::size_t(l) * M_ + m) * 2 + k];
            }
        return F;
    }

    Eigen::VectorXd pack(const std::vector<std::array<cplx, 2>>& F) const {
        Eigen::VectorXd r(n_);
        for (int k = 0; k < 2; ++k) {
            const int off = k * half();
            r[off] = F[0][k].real();
            for (int m = 1; m < M_; ++m) {
                r[off + 2 * m - 1] = F[m][k].real();
                r[off + 2 * m] = F[m][k].imag();
            }
        }
        return r;
    }

    static double sup(const std::vector<std::array<cplx, 2>>& F) {
        double s = 0.0;
        for (const auto& f : F) s = std::max({s, std::abs(f[0]), std::abs(f[1])});
        return s;
    }

    Eigen::MatrixXd seed_jacobian() const {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_, n_);
        const double Ly = g_.Ly();
        for (int m = 0; m < M_; ++m) {
            const auto f = jacobian_block(tab_, m, t_);
            const int parts = m == 0 ? 1 : 2;
            for (int part = 0; part < parts; ++part) {
                const int idx = m == 0 ? 0 : 2 * m - 1 + part;
                for (int k = 0; k < 2; ++k)
                    for (int j = 0; j < 2; ++j) J(k * half() + idx, j * half() + idx) = Ly * f[k * 2 + j];
            }
        }
        return J;
    }

    Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& x) const {
        Eigen::MatrixXd J(n_, n_);
        for (int i = 0; i < n_; ++i) {
            const double d = 1e-6 * (1.0 + std::abs(x[i]));
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += d;
            xm[i] -= d;
            J.col(i) = (pack(eval(xp)) - pack(eval(xm))) / (2.0 * d);
        }
        return J;
    }

    double w_norm(double sponge_width, double weight_xmax) const {
        const SolitonProfile s0(tab_.params(), tab_.c0());
        const double xmax = 0.5 * g_.Lx() - sponge_width;
        double acc = 0.0;
        for (int j = 0; j < g_.Nx(); ++j) {
            const double x = g_.x(j);
            if (std::abs(x) > xmax) continue;
            const double p1 = s0.phi(x), p2 = s0.r(x);
            double col = 0.0;
            for (int l = 0; l < g_.Ny(); ++l) {
                const std::size_t i = std::size_t(l) * g_.Nx() + j;
                const double a = d1_[i] - p1, b = d2_[i] - p2;
                col += a * a + b * b;
            }
            acc += col * std::exp(2.0 * tab_.alpha() * std::min(x, weight_xmax));
        }
        return std::sqrt(acc * g_.dx() * g_.dy());
    }

private:
    const ProjectionTable& tab_;
    Grid2D g_;
    double t_;
    int M_, n_;
    int jbeg_ = 0, jend_ = 0;  // x nodes jbeg_ <= j < jend_ enter F
    std::vector<double> d1_, d2_;  // Phi - U1, physical first component
};

}  // namespace

DecompositionState decompose_snapshot(const FieldPair& phi, const FieldPair& U1, double t,
                                      const ProjectionTable& tab) {
    const Grid2D& g = tab.grid();
    if (phi.grid() != g || U1.grid() != g) throw std::invalid_argument("decompose_snapshot: grid mismatch");
    const DecompositionOptions& opt = tab.options();
    if (tab.modes() < 1) throw std::invalid_argument("decompose_snapshot: no band modes");
    const Orthogonality orth(phi, U1, t, tab);
    DecompositionState st(g);
    st.t = t;
    st.grid = make_ygrid(g.Ly(), g.Ny());
    st.U1 = U1;
    st.w_norm = orth.w_norm(opt.sponge_width, opt.weight_xmax);
    if (!(st.w_norm <= opt.smallness))
        throw DecompositionError("decompose_snapshot: ||W||_{L2_alpha} = " + fmt_g(st.w_norm) +
                                 " exceeds the smallness threshold " + fmt_g(opt.smallness) +
                                 " at t=" + std::to_string(t));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(orth.size());
    auto F = orth.eval(x);
    double res = Orthogonality::sup(F);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(orth.seed_jacobian());
    int it = 0;
    while (res > opt.tol) {
        if (it == opt.max_iter)
            throw DecompositionError("decompose_snapshot: Newton did not converge in " +
                                     std::to_string(opt.max_iter) + " iterations at t=" + std::to_string(t) +
                                     " (residual " + fmt_g(res) + ")");
        ++it;
        const Eigen::VectorXd step = lu.solve(orth.pack(F));
        if (!step.allFinite()) throw DecompositionError("decompose_snapshot: singular Jacobian");
        x -= step;
        F = orth.eval(x);
        const double prev = res;
        res = Orthogonality::sup(F);
        if (res > opt.tol && res > opt.slow_ratio * prev) {
            lu.compute(orth.fd_jacobian(x));
            st.jacobian_refreshed = true;
        }
    }
    st.iterations = it;
    st.residual = res;
    st.F = orth.eval(x, &st.U2);
    st.ctil = orth.synth(x, 0);
    st.gamma = orth.synth(x, orth.half());

    const Field2D rec = reconstruct_potential(st, tab);
    const Field2D ph = phi.phi1_physical();
    double err = 0.0;
    for (int l = 0; l < g.Ny(); ++l) {
        const SolitonProfile s(tab.params(), tab.c0() + st.ctil[l]);
        for (int j = 0; j < g.Nx(); ++j) {
            err = std::max(err, std::abs(rec(j, l) - ph(j, l)));
            const double r2 = s.r(g.x(j) - st.gamma[l]) + U1.phi2(j, l) + st.U2.phi2(j, l);
            err = std::max(err, std::abs(r2 - phi.phi2(j, l)));
        }
    }
    st.reconstruction = err;
    return st;
}

Field2D reconstruct_potential(const DecompositionState& s, const ProjectionTable& tab) {
    const Grid2D& g = tab.grid();
    Field2D out(g);
    const Field2D u1 = s.U1.phi1_physical();
    for (int l = 0; l < g.Ny(); ++l) {
        const double c = tab.c0() + s.ctil[l];
        const SolitonProfile sp(tab.params(), c);
        const PsiCorrection psi(tab.params(), tab.c0(), c, tab.options().h);
        for (int j = 0; j < g.Nx(); ++j) {
            const double z = g.x(j) - s.gamma[l];
            out(j, l) = sp.phi(z) + u1(j, l) + s.U2.phi1(j, l) - psi.first_component(z, s.t);
        }
    }
    return out;
}

}  // namespace blwave
