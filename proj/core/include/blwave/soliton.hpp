#pragma once

#include <array>
#include <limits>

#include "blwave/jet.hpp"
#include "blwave/spectral.hpp"

namespace blwave {

// d^i/dc^i d^j/dz^j of phi_c at one point, i <= 2, j <= 5.
struct ProfilePoint {
    std::array<std::array<double, 6>, 3> d{};
    double c = 0.0;

    double phi(int i, int j) const { return d[i][j]; }
    // r_c = -c q_c = -c phi_z.
    double r(int i, int j) const {
        double v = -c * d[i][j + 1];
        if (i >= 1) v -= i * d[i - 1][j + 1];
        return v;
    }
};

class SolitonProfile {
public:
    SolitonProfile(const PhysParams& p, double c);

    const PhysParams& params() const { return p_; }
    double c() const { return c_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    // beta(c), beta'(c), beta''(c).
    std::array<double, 3> beta_derivs() const { return beta_d_; }

    double phi(double z) const;
    double q(double z) const;
    double r(double z) const { return -c_ * q(z); }
    ProfilePoint point(double z) const;
    // Residual of (bc^2-a) q'' - (c^2-1) q + (3c/2) q^2.
    double qc_residual(double z) const;

private:
    PhysParams p_;
    double c_, alpha_, beta_, amp_;
    std::array<double, 3> beta_d_;
};

SolitonProfile soliton_profile(const PhysParams& p, double c);

// (phi_c, r_c) along s = x cos(theta) + y sin(theta) - c t + gamma. The
// potential ramp is carried in the FieldPair mean gradient. Throws if the
// profile tail at the x seam exceeds seam_tol.
FieldPair line_wave_field(const Grid2D& g, const SolitonProfile& prof, double theta = 0.0,
                          double gamma = 0.0, double t = 0.0, double seam_tol = 1e-8);

// Unit-mass bump C exp(-1/(1-x^2)) on (-1,1).
double mollifier_constant();
double mollifier(double x);
// Integral of the unit bump over [x, infinity).
double mollifier_tail(double x);

class PsiCorrection {
public:
    PsiCorrection(const PhysParams& p, double c0, double c, double h);

    double c0() const { return c0_; }
    double c() const { return c_; }
    double h() const { return h_; }
    double amplitude() const { return amp_; }  // 2(beta(c0)-beta(c))
    // psi_c(z1) and its tail integral from z1 to infinity.
    double psi(double z1) const { return amp_ * mollifier(z1); }
    double psi_tilde(double z1) const { return amp_ * mollifier_tail(z1); }
    // z1 = z + (c0-1)t/2 + h.
    double z1(double z, double t) const { return z + 0.5 * (c0_ - 1.0) * t + h_; }
    double first_component(double z, double t) const { return psi_tilde(z1(z, t)); }
    // d/dc of psi_tilde at fixed z1.
    double dc_psi_tilde(double z1) const;

private:
    double c0_, c_, h_, amp_, dbeta_;
};

PsiCorrection psi_correction(const PhysParams& p, double c0, double c, double h);

}  // namespace blwave
