#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "blwave/fft.hpp"

namespace blwave {

struct PhysParams {
    double a = 0.5;
    double b = 1.0;
    // Throws unless 0 < a < b.
    void validate() const;
};

// Periodic box [-Lx/2, Lx/2) x [-Ly/2, Ly/2), x index fastest.
class Grid2D {
public:
    Grid2D(double Lx, double Ly, int Nx, int Ny);

    double Lx() const { return d_->Lx; }
    double Ly() const { return d_->Ly; }
    int Nx() const { return d_->Nx; }
    int Ny() const { return d_->Ny; }
    int Nxh() const { return d_->Nx / 2 + 1; }
    double dx() const { return d_->Lx / d_->Nx; }
    double dy() const { return d_->Ly / d_->Ny; }
    double x(int j) const { return -0.5 * d_->Lx + j * dx(); }
    double y(int k) const { return -0.5 * d_->Ly + k * dy(); }
    std::size_t size() const { return std::size_t(d_->Nx) * d_->Ny; }
    std::size_t spec_size() const { return std::size_t(Nxh()) * d_->Ny; }

    // Wavenumbers in standard DFT order.
    const std::vector<double>& xi() const { return d_->xi; }
    const std::vector<double>& eta() const { return d_->eta; }
    // Signed integer mode index in DFT order.
    static int signed_index(int j, int n) { return j <= n / 2 - 1 ? j : j - n; }

    const Fft2D& fft() const { return *d_->fft; }
    bool operator==(const Grid2D& o) const;
    bool operator!=(const Grid2D& o) const { return !(*this == o); }

private:
    struct Data {
        double Lx, Ly;
        int Nx, Ny;
        std::vector<double> xi, eta;
        std::shared_ptr<const Fft2D> fft;
    };
    std::shared_ptr<const Data> d_;
};

Grid2D make_grid(double Lx, double Ly, int Nx, int Ny);

class Field2D {
public:
    explicit Field2D(const Grid2D& g);
    Field2D(const Grid2D& g, RealVec values);

    const Grid2D& grid() const { return grid_; }
    RealVec& values() { return v_; }
    const RealVec& values() const { return v_; }
    double& operator()(int j, int k) { return v_[std::size_t(k) * grid_.Nx() + j]; }
    double operator()(int j, int k) const { return v_[std::size_t(k) * grid_.Nx() + j]; }

    ComplexVec spectrum() const;
    static Field2D from_spectrum(const Grid2D& g, const ComplexVec& s);

private:
    Grid2D grid_;
    RealVec v_;
};

// Phi = (phi1, phi2). phi1 is stored as its periodic part; the physical
// potential is gx*x + gy*y + phi1, since a line soliton potential is a step.
struct FieldPair {
    Field2D phi1;
    Field2D phi2;
    double gx = 0.0;
    double gy = 0.0;

    explicit FieldPair(const Grid2D& g) : phi1(g), phi2(g) {}
    FieldPair(Field2D p1, Field2D p2, double gx_ = 0.0, double gy_ = 0.0);
    const Grid2D& grid() const { return phi1.grid(); }
    // Physical potential samples including the mean-gradient ramp.
    Field2D phi1_physical() const;
};

using Symbol = std::function<cplx(double xi, double eta)>;

// Returns Re F^{-1}(m F f). Exact symmetrization makes real even symbols act
// as plain multipliers.
Field2D apply_multiplier(const Field2D& f, const Symbol& m);
Field2D dealias(const Field2D& f);
// 2/3 rule on a half spectrum in place.
void dealias_spectrum(const Grid2D& g, ComplexVec& s);
bool dealias_keep(const Grid2D& g, int j, int k);

double weighted_inner_product(const Field2D& u, const Field2D& v,
                              const std::function<double(double)>& weight = {});
double weighted_inner_product(std::span<const double> u, std::span<const double> v, double x0,
                              double dx, const std::function<double(double)>& weight = {});
// Parseval form of the plain pairing.
double spectral_inner_product(const Field2D& u, const Field2D& v);

// Spectral derivatives on a half spectrum; Nyquist modes of odd orders are zeroed.
void spec_dx(const Grid2D& g, const ComplexVec& in, ComplexVec& out);
void spec_dy(const Grid2D& g, const ComplexVec& in, ComplexVec& out);

}  // namespace blwave
