#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blwave/spectral.hpp"

namespace blwave {

enum class Integrator {
    // Exact per-mode propagator of the linear part, classical RK4 on the rest.
    IntegratingFactorRK4,
    EtdRK4,
};

Integrator parse_integrator(const std::string& name);
std::string to_string(Integrator i);

// Damping -strength * w(x) * phi2 in a band of the given width at the x seam,
// with w rising smoothly from 0 to 1 at the seam. Off when width or strength is 0.
struct Sponge {
    double width = 0.0;
    double strength = 0.0;
    bool active() const { return width > 0.0 && strength > 0.0; }
};

struct EvolutionConfig {
    double dt = 0.01;
    double T = 1.0;
    Integrator integrator = Integrator::IntegratingFactorRK4;
    bool dealias = true;
    bool nonlinear = true;
    int snapshot_every = 0;    // steps between snapshots, 0 for none
    double frame_speed = 0.0;  // x moves with this speed; adds frame_speed * d/dx
    Sponge sponge;
    double max_energy_jump = 0.1;  // abort if |dE| > this * E in one step
    // Ledger virial weight p(x - c1 t) with p = 1 + tanh(alpha x).
    double virial_alpha = 0.1;
    double virial_c1 = 1.1;

    // Throws on dt <= 0, T <= 0, T/dt not an integer, or cadence not dividing it.
    void validate() const;
    int steps() const;
};

// Rate of (periodic part of phi1, phi2); the mean gradient has zero rate.
// Returns (phi2 + s(gx + dx phi1), B^-1 A Lap phi1 + s dx phi2 - B^-1(phi2 Lap phi1 + 2 grad phi1 . grad phi2))
// for frame speed s. Products use dealiased inputs and output when requested.
FieldPair rhs_bl(const FieldPair& state, const PhysParams& p, double frame_speed = 0.0, bool dealias = true,
                 bool nonlinear = true);

// Step bound for the explicit part from its symbol-level spectral radius.
double dt_max(const FieldPair& state, const PhysParams& p);

double omega(const PhysParams& p, double xi, double eta);

class Stepper {
public:
    Stepper(const Grid2D& g, const PhysParams& p, const EvolutionConfig& cfg);

    // One step of size cfg.dt.
    FieldPair step(const FieldPair& s) const;
    const EvolutionConfig& config() const { return cfg_; }

    struct Spec {
        ComplexVec s1, s2;
        double gx = 0.0, gy = 0.0;
    };
    Spec to_spec(const FieldPair& s) const;
    FieldPair from_spec(const Spec& s) const;
    void step_spec(Spec& u) const;
    // Nonlinear and forcing part in spectral form.
    void nonlinear_rate(const Spec& u, Spec& out) const;
    double energy_spec(const Spec& u) const;

private:
    struct Prop {
        // phase * [[c, s], [-w, c]] per mode.
        std::vector<cplx> ph;
        std::vector<double> c, s, w;
    };
    using Mat2 = std::array<cplx, 4>;
    void apply_prop(const Prop& P, const Spec& in, Spec& out) const;
    void setup_etd();
    void step_if(Spec& u) const;
    void step_etd(Spec& u) const;

    Grid2D g_;
    PhysParams p_;
    EvolutionConfig cfg_;
    std::vector<double> kx_, ky_, k2_, binv_;
    std::vector<char> keep_;
    std::vector<double> sponge_;
    Prop full_, half_;
    // ETD-RK4 per-mode matrices, row-major: e^{hM}, e^{hM/2}, (h/2) phi1(hM/2), and
    // h(phi1 - 3phi2 + 4phi3), h(phi2 - 2phi3), h(4phi3 - phi2) at hM.
    std::vector<Mat2> e_, eh_, q_, f1_, f2_, f3_;
};

FieldPair step(const FieldPair& state, const PhysParams& p, const EvolutionConfig& cfg);

double energy_total(const FieldPair& state, const PhysParams& p);

struct EnergyDensityFlux {
    Field2D density, flux_x, flux_y;
    double residual = 0.0;      // L2 norm of dE/dt - div F
    double density_norm = 0.0;  // L2 norm of the density
};
// Lab-frame density and flux; dE/dt by the chain rule through rhs_bl.
EnergyDensityFlux energy_density_flux(const FieldPair& state, const PhysParams& p, bool dealias = false);

struct VirialValue {
    double value = 0.0;
    double seam_fraction = 0.0;  // share of the energy within 5% of Lx of the weight's seam
    bool seam_ok = true;         // seam_fraction <= 1e-8
};
// int (1 + tanh(alpha (x_lab - c1 t))) E dx dy with x_lab = x + frame_speed t,
// evaluated on the periodic box centered on the weight's transition.
VirialValue virial_weighted_energy(const FieldPair& state, const PhysParams& p, double alpha, double c1,
                                   double t, double frame_speed = 0.0);

struct DispersionReport {
    double max_grad = 0.0;
    double max_cross = 0.0;
    double min_D_eig = 0.0;
    bool pass = false;
};
DispersionReport dispersion_check(const PhysParams& p, const Grid2D& g);

struct EnergyLedger {
    std::vector<double> t, E, I, flux_residual;
    void write_csv(const std::string& path) const;
};

using SnapshotObserver = std::function<void(double t, int step, const FieldPair& state)>;

struct EvolutionResult {
    FieldPair state;
    EnergyLedger ledger;
};
// Runs cfg.steps() steps. At t = 0 and every cfg.snapshot_every steps the
// ledger gets a row and the observer (if set) sees the state.
EvolutionResult evolve(const FieldPair& init, const PhysParams& p, const EvolutionConfig& cfg,
                       const SnapshotObserver& observer = {}, bool ledger_flux = true);

}  // namespace blwave
