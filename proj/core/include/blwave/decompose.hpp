#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "blwave/evolution.hpp"
#include "blwave/modulation.hpp"

namespace blwave {

// U1(t) for U1(0) = U0 in the c0-moving frame, with the integrator, grid and
// sponge of cfg. cfg.frame_speed is overridden by c0.
EvolutionResult evolve_free_reference(const FieldPair& U0, const PhysParams& p, double c0,
                                      const EvolutionConfig& cfg, const SnapshotObserver& observer = {});

struct DecompositionOptions {
    double h = 10.0;
    double eta0 = -1.0;   // default mc.eta0
    double alpha = -1.0;  // default mc.alpha
    double tol = 1e-10;   // on max_{k,eta} |F_k(eta)|
    int max_iter = 25;
    // Threshold on ||W||_{L2_alpha}; the sponge band at the x seam is excluded.
    double smallness = 10.0;
    double sponge_width = 0.0;
    // The weight is frozen at e^{2 alpha weight_xmax} beyond weight_xmax;
    // radiation leaking through the x seam would otherwise dominate.
    double weight_xmax = 20.0;
    // Chord steps slower than this contraction trigger a finite-difference Jacobian.
    double slow_ratio = 0.5;
    double dc = 5e-3;  // c spacing of the quadratic g* interpolation
    // Coarse 1D spacing ceiling for the eigenvector solves.
    double dz_max = 0.8;
};

// g*_k(z, eta_m, c) for the band modes eta_m = 2 pi m / Ly, m = 0..M, on a 1D
// grid whose nodes contain the x nodes of the 2D grid. Quadratic in c about
// c0; shifts z -> x - gamma are spectral phase shifts on that grid.
class ProjectionTable {
public:
    ProjectionTable(const PhysParams& p, const ModulationCoefficients& mc, const Grid2D& g,
                    const DecompositionOptions& opt = {});

    const PhysParams& params() const { return p_; }
    const ModulationCoefficients& coefficients() const { return mc_; }
    const Grid2D& grid() const { return g_; }
    const DecompositionOptions& options() const { return opt_; }
    double c0() const { return mc_.c0; }
    double alpha() const { return alpha_; }
    double eta0() const { return eta0_; }
    int modes() const { return int(eta_.size()); }
    double eta(int m) const { return eta_[m]; }
    const Grid1D& grid1d() const { return g1_; }

    // Unweighted components of g*_k(x_j - shift, eta_m, c0 + ctil), j = 0..Nx-1.
    void evaluate(int k, int m, double shift, double ctil, std::vector<double>& u1, std::vector<double>& u2) const;

private:
    PhysParams p_;
    ModulationCoefficients mc_;
    Grid2D g_;
    DecompositionOptions opt_;
    double alpha_ = 0.0, eta0_ = 0.0;
    Grid1D g1_;       // coarse solve grid
    int nf_ = 0;      // fine grid size, spacing dx
    int offset_ = 0;  // fine index of x_0
    std::vector<double> eta_;
    std::vector<double> kappa_;  // fine wavenumbers
    // spec_[((m * 2 + k) * 2 + comp) * 3 + order]: spectra of the weighted
    // e^{-alpha z} g* Taylor terms in c on the fine grid.
    std::vector<ComplexVec> spec_;
};

struct DecompositionState {
    double t = 0.0;
    YGrid grid;
    std::vector<double> ctil, gamma;
    FieldPair U1, U2;
    // F_k(eta_m) after convergence, [m][k-1].
    std::vector<std::array<cplx, 2>> F;
    double residual = 0.0;
    int iterations = 0;
    bool jacobian_refreshed = false;
    double w_norm = 0.0;          // ||W||_{L2_alpha}
    double reconstruction = 0.0;  // sup |Phi - (Phi_c + U1 + U2 - Psi_c)|

    explicit DecompositionState(const Grid2D& g) : U1(g), U2(g) {}
};

class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Splits Phi(t) (c0-moving frame, soliton at x = 0 at t = 0) into the
// modulating soliton, U1 and U2 by Newton on the band Fourier coefficients
// of (ctil, gamma) so that F_1 = F_2 = 0. Throws DecompositionError on
// smallness violation or non-convergence in max_iter steps.
DecompositionState decompose_snapshot(const FieldPair& phi, const FieldPair& U1, double t,
                                      const ProjectionTable& table);

// Phi_c(z) + U1 + U2 - Psi_c(z1) on the grid, physical first component.
Field2D reconstruct_potential(const DecompositionState& s, const ProjectionTable& table);

// Constant-coefficient Jacobian block f_kj(eta_m) at time t (h_t = h + (c0-1)t/2).
std::array<double, 4> jacobian_block(const ProjectionTable& table, int m, double t);

}  // namespace blwave
