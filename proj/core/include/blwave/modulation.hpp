#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "blwave/linear1d.hpp"

namespace blwave {

// Periodic transverse grid y_k = -Ly/2 + k dy, same layout as Grid2D rows.
struct YGrid {
    double Ly = 0.0;
    int Ny = 0;

    double dy() const { return Ly / Ny; }
    double y(int k) const { return -0.5 * Ly + k * dy(); }
    // Wavenumber in DFT order.
    double eta(int k) const;
};

YGrid make_ygrid(double Ly, int Ny);

// Smooth step: 1 for x <= 0, 0 for x >= 1, built from exp(-1/x).
double smooth_step(double x);
// 1 for |eta| <= inner, 0 for |eta| >= outer.
double smooth_cutoff(double eta, double inner, double outer);
// chi1 of the low-frequency kernels: 1 on |eta| <= eta0/2, 0 on |eta| >= 3 eta0/4.
double chi1(double eta, double eta0);
bool in_band(double eta, double eta0);

// Spectral helpers on real periodic samples.
std::vector<cplx> y_forward(const std::vector<double>& f);
std::vector<double> y_inverse(const std::vector<cplx>& s);
std::vector<double> band_project(const YGrid& g, const std::vector<double>& f, double eta0);
std::vector<double> y_derivative(const YGrid& g, const std::vector<double>& f, int order = 1);
double l2_norm(const YGrid& g, const std::vector<double>& f);
double l1_norm(const YGrid& g, const std::vector<double>& f);
double sup_norm(const std::vector<double>& f);

// ---- Linearized modulation semigroup ----

// A_*(eta) = [[-(l2+nu) eta^2, 1], [-l1^2 eta^2, -(l2-nu) eta^2]], row-major.
std::array<double, 4> astar_matrix(const ModulationCoefficients& mc, double eta);
// omega(eta) = sqrt(1 - (nu/l1)^2 eta^2); throws std::invalid_argument if imaginary.
double omega_star(const ModulationCoefficients& mc, double eta);
// Closed form of exp(t A_*(eta)), row-major.
std::array<double, 4> etA_symbol(const ModulationCoefficients& mc, double t, double eta);

struct ReducedState {
    YGrid grid;
    std::vector<double> gamma, ctil;

    ReducedState() = default;
    explicit ReducedState(const YGrid& g) : grid(g), gamma(g.Ny, 0.0), ctil(g.Ny, 0.0) {}
};

// Mode-wise exp(t A_*) on the band |eta| <= eta0; modes outside the band are
// dropped (the semigroup acts on band-limited functions).
ReducedState semigroup_etA(double t, const ReducedState& f, const ModulationCoefficients& mc);

struct KernelSet {
    double t = 0.0;
    YGrid grid;
    std::vector<double> K1, K2, K3, dK3;
};
// K1, K2, K3 and d/dy K3 at time t by trapezoid quadrature over eta
// (equivalently an inverse DFT on the periodic box).
KernelSet fundamental_kernels(const ModulationCoefficients& mc, double t, const YGrid& g);
// (K3(t) * f) for samples f on the kernel grid.
std::vector<double> k3_convolve(const ModulationCoefficients& mc, double t, const YGrid& g,
                                const std::vector<double>& f);

// ---- Reduced modulation system ----

struct ReducedConfig {
    double dt = 0.5;
    double T = 1e4;
    // Sample times; empty means log-spaced from t_first to T.
    std::vector<double> sample_times;
    int samples = 61;
    double t_first = 1.0;
    bool nonlinear = true;
    // Keep c-dependence of a_ij to linear order in ctil.
    bool variable_coefficients = true;
    double blowup = 1e3;  // abort if sup |state| grows by this factor
    bool keep_fields = true;
};

// A(c, D_y)(gamma, ctil) + (a15 gamma_y^2, 2 a23 c_y gamma_y), projected on the band.
ReducedState reduced_rhs(const ReducedState& s, const ModulationCoefficients& mc, bool nonlinear = true,
                         bool variable_coefficients = true);
// Linear symbol A(c0, eta) of the reduced system, row-major.
std::array<double, 4> reduced_symbol(const ModulationCoefficients& mc, double eta);

struct ModulationSample {
    double t = 0.0;
    double c_norm = 0.0;       // ||ctil||
    double cy_norm = 0.0;      // ||d_y ctil||
    double gy_norm = 0.0;      // ||gamma_y||
    double gamma_sup = 0.0;    // sup |gamma|
    double b_minus_c = 0.0;    // ||b - ctil||
    double burgers_mismatch = 0.0;
    double mass_plus = 0.0, mass_minus = 0.0;
};

struct ModulationTrack {
    std::vector<ModulationSample> samples;
    // Field samples at each recorded time when kept.
    std::vector<std::vector<double>> gamma, ctil, b;
    YGrid grid;

    std::vector<double> times() const;
    std::vector<double> column(double ModulationSample::*field) const;
    void write_csv(const std::string& path) const;
};

// b = P1 {rho(c) - rho(c0)} to second order in ctil: b = P1(ctil + rho''/2 ctil^2).
std::vector<double> b_from_ctil(const YGrid& g, const std::vector<double>& ctil, const ModulationCoefficients& mc);

// Diagnostics of one (gamma, ctil) sample, including the Burgers mismatch.
ModulationSample measure_sample(double t, const YGrid& g, const std::vector<double>& gamma,
                                const std::vector<double>& ctil, const ModulationCoefficients& mc);

ModulationTrack integrate_reduced(const ReducedState& init, const ModulationCoefficients& mc,
                                  const ReducedConfig& cfg);

// ---- Burgers asymptotics ----

// H_t(y) = (4 pi t)^{-1/2} exp(-y^2/4t) and its integral from 0 to y.
double heat_kernel(double t, double y);
double heat_kernel_integral(double t, double y);

struct BurgersProfile {
    double lambda2 = 0.0, p3 = 0.0;
    double m_plus = 0.0, m_minus = 0.0;
    // u_B^+ and u_B^- at (t, y).
    double plus(double t, double y) const;
    double minus(double t, double y) const;
};
// Solves (l2/p3) log((2 +- m)/(2 -+ m)) = mass for m in (-2, 2).
BurgersProfile burgers_profile(const ModulationCoefficients& mc, double mass_plus, double mass_minus);

// ---- Phase limit ----

struct ForcingSeries {
    YGrid grid;
    std::vector<double> s;                 // sample times, increasing, s[0] >= 0
    std::vector<std::vector<double>> f;    // f[i][k] = f(s_i, y_k)
};

struct PhasePrediction {
    std::vector<double> gamma;  // int_0^t H * W * f ds on the grid
    double gamma_star = 0.0;    // (2 l1)^{-1} int int f
    double center = 0.0;        // value at y = 0
    double inside_sup = 0.0;    // sup_{|y| <= (l1 - delta) t} |gamma - gamma_star|
    double outside_sup = 0.0;   // sup_{|y| >= (l1 + delta) t} |gamma|
};
PhasePrediction phase_limit_predictor(const ForcingSeries& f, const ModulationCoefficients& mc, double t,
                                      double delta);

}  // namespace blwave
