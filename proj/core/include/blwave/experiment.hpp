#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blwave/decompose.hpp"
#include "blwave/lab.hpp"

namespace blwave {

enum class Perturbation {
    None,
    // eps (1 + ((x-x0)/sx)^2 + (y/sy)^2)^{-2} in both components.
    LocalizedBump,
    // phi1 as LocalizedBump, phi2 = d_x phi1: a long wave moving in -x, so it
    // crosses the soliton once instead of riding along with it.
    LeftGoingBump,
    // eps (d_c Phi_c0(x) - d_c Psi_c0(x + h)) (F^{-1} zeta)(y), zeta a smooth
    // bump on |eta| < mode_width * eta0 with zeta(0) = 1.
    ResonantMode,
};

Perturbation parse_perturbation(const std::string& s);
std::string to_string(Perturbation p);

struct ExperimentConfig {
    PhysParams phys;
    double c0 = 1.05;
    double Lx = 200.0, Ly = 512.0;
    int Nx = 512, Ny = 128;
    int grid1d_N = 384;  // coefficient solves
    double dt = 0.05;
    double T = 200.0;
    Integrator integrator = Integrator::IntegratingFactorRK4;
    bool dealias = true;
    int snapshot_every = 50;
    Sponge sponge{20.0, 1.0};

    Perturbation perturbation = Perturbation::LocalizedBump;
    double epsilon = 1e-3;
    double bump_x0 = 0.0, bump_sx = 4.0, bump_sy = 16.0;
    double mode_width = 0.9;

    double h = 10.0;
    double eta0 = -1.0;   // default from the coefficients
    double alpha = -1.0;  // default alpha_c0 / 2
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
    double smallness = 10.0;

    // Decay fit window on ||ctil||, and the cone margin delta for the
    // outside-cone sup |y| >= (lambda1 + delta) t (default lambda1).
    double fit_t_min = 50.0, fit_t_max = 200.0;
    double cone_delta = -1.0;
    std::uint64_t seed = 1;
    int bootstrap = 1000;
    bool write_snapshots = false;

    static ExperimentConfig from_kv(const KeyValueConfig& kv);
    static ExperimentConfig load(const std::string& path);
    // Every tunable, as read back by from_kv.
    KeyValueConfig to_kv() const;
    void validate() const;
    static const std::vector<std::string>& keys();
};

struct ExperimentResult {
    ModulationCoefficients coefficients;
    ModulationTrack track;  // samples at snapshot times, fields kept
    // Per snapshot.
    std::vector<double> residual, w_norm, reconstruction, u2_sup;
    std::vector<int> iterations;
    std::vector<double> plateau, outside;  // max |gamma| inside |y| <= l1 t, and outside the cone
    std::vector<double> energy_t, energy;
    double init_norm = 0.0;  // weighted size of U0
    double cone_delta = 0.0;
    bool has_fit = false;
    FitResult c_fit;
    double runtime_s = 0.0;
};

// ||(1+x^2+y^2) grad u01||_{H^1} + ||(1+x^2+y^2) u02||_{H^1} on the box.
double weighted_initial_norm(const FieldPair& U0);

FieldPair make_perturbation(const ExperimentConfig& cfg, const ModulationCoefficients& mc, const Grid2D& g);

// Runs the main and free-reference evolutions, decomposes every snapshot and
// writes manifest.toml, coefficients.txt, modulation.csv (+ .fits.csv),
// decomposition.csv, energy.csv and final_profile.csv into out_dir (skipped
// when out_dir is empty). Errors name the failing stage.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Re-decomposes the phi_/u1_ snapshot pairs of a run written with
// write_snapshots, using the run's manifest.toml. Snapshot i is at time
// i * snapshot_every * dt.
ModulationTrack extract_modulation(const std::string& run_dir);

}  // namespace blwave
