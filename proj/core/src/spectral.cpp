#include "blwave/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blwave {

void PhysParams::validate() const {
    if (!(a > 0.0) || !(b > a) || !std::isfinite(b))
        throw std::invalid_argument("PhysParams: require 0 < a < b (got a=" + std::to_string(a) +
                                    ", b=" + std::to_string(b) + ")");
}

Grid2D::Grid2D(double Lx, double Ly, int Nx, int Ny) {
    if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly))
        throw std::invalid_argument("Grid2D: lengths must be positive");
    if (Nx % 2 != 0 || Ny % 2 != 0) throw std::invalid_argument("Grid2D: sample counts must be even");
    if (Nx < 8 || Ny < 8) throw std::invalid_argument("Grid2D: sample counts must be >= 8");
    auto d = std::make_shared<Data>();
    d->Lx = Lx;
    d->Ly = Ly;
    d->Nx = Nx;
    d->Ny = Ny;
    d->xi.resize(Nx);
    d->eta.resize(Ny);
    const double tp = 2.0 * std::numbers::pi;
    for (int j = 0; j < Nx; ++j) d->xi[j] = tp * signed_index(j, Nx) / Lx;
    for (int k = 0; k < Ny; ++k) d->eta[k] = tp * signed_index(k, Ny) / Ly;
    d->fft = fft2d_plan(Nx, Ny);
    d_ = d;
}

bool Grid2D::operator==(const Grid2D& o) const {
    return d_ == o.d_ || (Nx() == o.Nx() && Ny() == o.Ny() && Lx() == o.Lx() && Ly() == o.Ly());
}

Grid2D make_grid(double Lx, double Ly, int Nx, int Ny) { return Grid2D(Lx, Ly, Nx, Ny); }

Field2D::Field2D(const Grid2D& g) : grid_(g), v_(g.size(), 0.0) {}

Field2D::Field2D(const Grid2D& g, RealVec values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.size()) throw std::invalid_argument("Field2D: value count mismatch");
}

ComplexVec Field2D::spectrum() const {
    ComplexVec s;
    grid_.fft().forward(v_, s);
    return s;
}

Field2D Field2D::from_spectrum(const Grid2D& g, const ComplexVec& s) {
    RealVec v;
    g.fft().inverse(s, v);
    return Field2D(g, std::move(v));
}

FieldPair::FieldPair(Field2D p1, Field2D p2, double gx_, double gy_)
    : phi1(std::move(p1)), phi2(std::move(p2)), gx(gx_), gy(gy_) {
    if (phi1.grid() != phi2.grid()) throw std::invalid_argument("FieldPair: grid mismatch");
}

Field2D FieldPair::phi1_physical() const {
    Field2D out = phi1;
    const auto& g = grid();
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < g.Nx(); ++j) out(j, k) += gx * g.x(j) + gy * g.y(k);
    return out;
}

Field2D apply_multiplier(const Field2D& f, const Symbol& m) {
    const auto& g = f.grid();
    ComplexVec s = f.spectrum();
    const int nx = g.Nx(), ny = g.Ny(), nxh = g.Nxh();
    for (int k = 0; k < ny; ++k) {
        const int km = (ny - k) % ny;
        for (int j = 0; j < nxh; ++j) {
            const int jm = (nx - j) % nx;
            const cplx m1 = m(g.xi()[j], g.eta()[k]);
            const cplx m2 = m(g.xi()[jm], g.eta()[km]);
            if (!std::isfinite(m1.real()) || !std::isfinite(m1.imag()) || !std::isfinite(m2.real()) ||
                !std::isfinite(m2.imag()))
                throw std::domain_error("apply_multiplier: non-finite symbol at mode (" +
                                        std::to_string(j) + "," + std::to_string(k) + ")");
            s[std::size_t(k) * nxh + j] *= 0.5 * (m1 + std::conj(m2));
        }
    }
    return Field2D::from_spectrum(g, s);
}

bool dealias_keep(const Grid2D& g, int j, int k) {
    const int sj = std::abs(Grid2D::signed_index(j, g.Nx()));
    const int sk = std::abs(Grid2D::signed_index(k, g.Ny()));
    return 3 * sj <= g.Nx() && 3 * sk <= g.Ny();
}

void dealias_spectrum(const Grid2D& g, ComplexVec& s) {
    const int nxh = g.Nxh();
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < nxh; ++j)
            if (!dealias_keep(g, j, k)) s[std::size_t(k) * nxh + j] = 0.0;
}

Field2D dealias(const Field2D& f) {
    ComplexVec s = f.spectrum();
    dealias_spectrum(f.grid(), s);
    return Field2D::from_spectrum(f.grid(), s);
}

double weighted_inner_product(const Field2D& u, const Field2D& v,
                              const std::function<double(double)>& weight) {
    if (u.grid() != v.grid()) throw std::invalid_argument("weighted_inner_product: grid mismatch");
    const auto& g = u.grid();
    std::vector<double> w(g.Nx(), 1.0);
    if (weight)
        for (int j = 0; j < g.Nx(); ++j) w[j] = weight(g.x(j));
    double total = 0.0;
    for (int k = 0; k < g.Ny(); ++k) {
        double row = 0.0;
        for (int j = 0; j < g.Nx(); ++j) row += u(j, k) * v(j, k) * w[j];
        total += row;
    }
    return total * g.dx() * g.dy();
}

double weighted_inner_product(std::span<const double> u, std::span<const double> v, double x0,
                              double dx, const std::function<double(double)>& weight) {
    if (u.size() != v.size()) throw std::invalid_argument("weighted_inner_product: size mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        total += u[j] * v[j] * (weight ? weight(x0 + double(j) * dx) : 1.0);
    return total * dx;
}

double spectral_inner_product(const Field2D& u, const Field2D& v) {
    if (u.grid() != v.grid()) throw std::invalid_argument("spectral_inner_product: grid mismatch");
    const auto& g = u.grid();
    const ComplexVec su = u.spectrum(), sv = v.spectrum();
    const int nxh = g.Nxh();
    double total = 0.0;
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < nxh; ++j) {
            const double mult = (j == 0 || 2 * j == g.Nx()) ? 1.0 : 2.0;
            const std::size_t i = std::size_t(k) * nxh + j;
            total += mult * (std::conj(su[i]) * sv[i]).real();
        }
    return total * g.dx() * g.dy() / double(g.size());
}

void spec_dx(const Grid2D& g, const ComplexVec& in, ComplexVec& out) {
    const int nxh = g.Nxh();
    out.resize(in.size());
    for (int k = 0; k < g.Ny(); ++k)
        for (int j = 0; j < nxh; ++j) {
            const std::size_t i = std::size_t(k) * nxh + j;
            out[i] = (2 * j == g.Nx()) ? cplx(0.0) : cplx(0.0, g.xi()[j]) * in[i];
        }
}

void spec_dy(const Grid2D& g, const ComplexVec& in, ComplexVec& out) {
    const int nxh = g.Nxh();
    out.resize(in.size());
    for (int k = 0; k < g.Ny(); ++k) {
        const double e = (2 * k == g.Ny()) ? 0.0 : g.eta()[k];
        for (int j = 0; j < nxh; ++j) {
            const std::size_t i = std::size_t(k) * nxh + j;
            out[i] = cplx(0.0, e) * in[i];
        }
    }
}

}  // namespace blwave
