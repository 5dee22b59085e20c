#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "blwave/soliton.hpp"

namespace blwave {

// Collocation grid z_j = -L + j*2L/N on [-L, L) with weight rate alpha.
struct Grid1D {
    double L = 0.0;
    int N = 0;
    double alpha = 0.0;

    double dz() const { return 2.0 * L / N; }
    double z(int j) const { return -L + j * dz(); }
    double k(int j) const;
};

Grid1D make_grid1d(double L, int N, double alpha);
// Default grid for speed c: L so that exp(-alpha_c L) = 1e-10 * margin, N even.
Grid1D default_grid1d(const PhysParams& p, double c, double alpha = -1.0, int N = 384);
// Throws if exp(-alpha_c L) > 1e-10 or alpha outside (0, alpha_c).
void check_grid1d(const Grid1D& g, const SolitonProfile& s);

using CVec = std::vector<cplx>;

struct VectorPair1D {
    CVec u1, u2;

    VectorPair1D() = default;
    explicit VectorPair1D(int n) : u1(n, 0.0), u2(n, 0.0) {}
    int size() const { return int(u1.size()); }
    // L2 norm with weight exp(2 rate z).
    double norm(const Grid1D& g, double rate = 0.0) const;
};

// <f, g> = sum_j int f_j conj(g_j) dz.
cplx pairing(const VectorPair1D& f, const VectorPair1D& g, const Grid1D& grid);
// Multiply by exp(rate z) pointwise.
VectorPair1D weighted(const VectorPair1D& f, const Grid1D& g, double rate);

// Periodic multiplier with the real-preserving symmetrization used everywhere
// in this module: m_eff(k_j) = (m(k_j) + conj m(k_{-j}))/2.
CVec apply_symbol(const CVec& u, const Grid1D& g, const std::function<cplx(double)>& m);
CVec symbol_table(const Grid1D& g, const std::function<cplx(double)>& m);

// Samples of the soliton and its derivatives on a grid.
struct ProfileSamples {
    std::vector<ProfilePoint> pts;
    double c = 0.0;
    std::array<double, 3> beta{};
};
ProfileSamples sample_profile(const SolitonProfile& s, const Grid1D& g);

// e^{alpha z} L_c(eta) e^{-alpha z} with d/dz -> d/dz - alpha, alpha = g.alpha.
class LinearizedOperator {
public:
    // with_potential = false drops V_c(eta) and keeps c d/dz + L(eta).
    LinearizedOperator(const PhysParams& p, double c, double eta, const Grid1D& g, bool with_potential = true);

    const Grid1D& grid() const { return g_; }
    double eta() const { return eta_; }
    VectorPair1D apply(const VectorPair1D& u) const;
    // Real 2N x 2N matrix acting on (u1; u2).
    Eigen::MatrixXd dense() const;

private:
    PhysParams p_;
    double c_, eta_;
    Grid1D g_;
    CVec s_, lsym_, binv_;
    std::vector<double> q_, qp_, r_, rp_;
};

Eigen::MatrixXd build_linearized(const PhysParams& p, double c, double eta, const Grid1D& g);

struct ZetaBasis {
    // Unweighted real samples.
    VectorPair1D z1, z2, z1s, z2s;
    double beta1 = 0.0;  // <z1, z1*>
    double beta1_alt = 0.0;  // <z2, z2*>
    double beta2 = 0.0;  // <z2, z1*>
    double cross = 0.0;  // <z1, z2*>
    double cross_normalized = 0.0;
};
ZetaBasis zeta_basis(const PhysParams& p, double c, const Grid1D& g);

// 1D energy (1/2) int (q^2 + a q'^2 + r^2 + b r'^2) of the soliton.
double soliton_energy(const PhysParams& p, double c, const Grid1D& g);

// Second component of L_{1,c}(0) U for U given through pointwise samples.
struct L1Input {
    std::vector<double> u1, u1p, u1pp, u2, u2p;
};
std::vector<double> apply_L1(const PhysParams& p, const ProfileSamples& ps, const Grid1D& g,
                             const L1Input& u);
// d/dc of L_{1,c}(0) U_c given U_c and dU_c/dc.
std::vector<double> apply_L1_dc(const PhysParams& p, const ProfileSamples& ps, const Grid1D& g,
                                const L1Input& u, const L1Input& du);

struct ModulationCoefficients {
    double c0 = 0.0;
    double a = 0.0, b = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    double m[2][5] = {};  // m[k-1][j-1]
    double A[2][5] = {};  // a_{ij}
    double dA[2][5] = {};  // d a_{ij}/dc at c0, central differences
    double lambda1 = 0.0, lambda2 = 0.0;
    double nu = 0.0;
    double rho_pp = 0.0;
    double p1 = 0.0, p3 = 0.0;
    double eta0 = 0.0;
    double alpha = 0.0;
    double m21_eta_path = 0.0;  // m21 from eta differences of the full operator

    double a_(int i, int j) const { return A[i - 1][j - 1]; }
    double m_(int k, int j) const { return m[k - 1][j - 1]; }
    // a_{ij}(c0) as a key-value report.
    std::string report() const;
};

struct RawCoefficients {
    double beta1, beta2;
    double m[2][5];
    double A[2][5];
};
// beta, m and a at one speed; no sign checks.
RawCoefficients raw_coefficients(const PhysParams& p, double c, const Grid1D& g);

struct CoefficientOptions {
    double alpha = -1.0;  // default alpha_c0 / 2
    double eta0 = -1.0;   // default from |nu| eta0 <= 0.5 lambda1, capped by eta0_cap
    double eta0_cap = -1.0;
    double rho_step = 2e-3;
    bool check_signs = true;
    // Shrink the default eta0 by 0.8 until the branch at eta0 is isolated.
    bool check_branch = true;
};
ModulationCoefficients modulation_coefficients(const PhysParams& p, double c0, const Grid1D& g,
                                               const CoefficientOptions& opt = {});

// rho(c) = int_{c0}^c a21~/a21 with a21~(c) = a21(c0) exp(int 2 a23/a21), and rho'(c).
struct RhoFunction {
    PhysParams p;
    double c0;
    Grid1D grid;
    double tol = 1e-10;
    double a21(double c) const;
    double a23(double c) const;
    double rho_prime(double c) const;
    double rho(double c) const;
    double rho_pp_richardson(double h) const;
};

struct EigenCurve {
    std::vector<double> eta;
    std::vector<cplx> lambda;
    std::vector<Eigen::VectorXcd> right;  // weighted right eigenvectors (u1; u2)
    std::vector<Eigen::VectorXcd> left;   // weighted left eigenvectors
    double lambda1_fit = 0.0, lambda2_fit = 0.0;
};

struct EigenOptions {
    int max_iter = 200;
    double tol = 1e-11;
    double ambiguity_ratio = 0.5;
};

// Eigenvalue of the dense weighted operator nearest `target`, with right and
// left eigenvectors. Throws if the nearest eigenvalue is not isolated.
struct EigenPair {
    cplx lambda;
    Eigen::VectorXcd right, left;
    cplx second;  // next eigenvalue found by the subspace iteration
};
EigenPair nearest_eigenpair(const Eigen::MatrixXd& M, cplx target, const EigenOptions& opt = {});

EigenCurve eigencurve(const PhysParams& p, double c, const Grid1D& g, const std::vector<double>& etas,
                      const ModulationCoefficients& mc, const EigenOptions& opt = {});

struct GapReport {
    double max_re_outside_band = 0.0;
    double max_re_undeflated = 0.0;
    bool pass = false;
    std::vector<double> eta;
    std::vector<double> max_re_per_eta;
};
GapReport spectral_gap_check(const PhysParams& p, double c, const Grid1D& g, double eta0,
                             const ModulationCoefficients& mc, const std::vector<double>& etas);

struct ProjectionPair {
    // Unweighted real samples, except that g*_k are stored times exp(-alpha z)
    // and g_k times exp(alpha z) to keep both bounded on the grid.
    VectorPair1D g1, g2, g1s, g2s;
    double kappa = 0.0;
    double eta = 0.0;
    bool fallback = false;
};
ProjectionPair projection_pair(const PhysParams& p, double c, double eta, const Grid1D& g,
                               const ModulationCoefficients& mc, const EigenOptions& opt = {});

// Largest eta0 with |nu| eta0 <= 0.5 lambda1 (infinite if nu = 0).
double default_eta0(double lambda1, double nu);

}  // namespace blwave
