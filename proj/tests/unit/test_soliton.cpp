#include <gtest/gtest.h>

#include <cmath>

#include "blwave/soliton.hpp"

using namespace blwave;

namespace {
const PhysParams kP{0.5, 1.0};
}

TEST(Soliton, PeakValueAndRate) {
    const SolitonProfile s = soliton_profile(kP, 1.2);
    EXPECT_NEAR(s.q(0.0), (1.44 - 1) / 1.2, 1e-15);
    EXPECT_NEAR(s.q(0.0), 0.36667, 5e-6);
    EXPECT_NEAR(s.alpha(), std::sqrt(0.44 / 0.94), 1e-15);
    EXPECT_NEAR(s.alpha(), 0.68417, 5e-6);
}

TEST(Soliton, RejectsSubsonicSpeed) {
    EXPECT_THROW(soliton_profile(kP, 1.0), std::invalid_argument);
    EXPECT_THROW(soliton_profile(kP, 0.3), std::invalid_argument);
    EXPECT_THROW(soliton_profile(PhysParams{1.0, 0.5}, 1.2), std::invalid_argument);
}

TEST(Soliton, ProfileOdeResidual) {
    for (double c : {1.01, 1.05, 1.2, 1.5, 2.0}) {
        const SolitonProfile s = soliton_profile(kP, c);
        double worst = 0.0;
        for (int i = 0; i < 2048; ++i) worst = std::max(worst, std::abs(s.qc_residual(-40.0 + 80.0 * i / 2048)));
        EXPECT_LE(worst, 1e-10) << "c=" << c;
    }
}

TEST(Soliton, LimitsAndEvenness) {
    const SolitonProfile s = soliton_profile(kP, 1.3);
    EXPECT_NEAR(s.phi(200.0), 0.0, 1e-14);
    EXPECT_NEAR(s.phi(-200.0), -2 * s.beta(), 1e-14);
    for (double z : {0.1, 1.7, 5.0, 33.0}) EXPECT_EQ(s.q(z), s.q(-z));
}

TEST(Soliton, JetMatchesClosedForms) {
    const SolitonProfile s = soliton_profile(kP, 1.2);
    for (double z : {-7.0, -0.3, 0.0, 2.5, 11.0}) {
        const ProfilePoint p = s.point(z);
        EXPECT_NEAR(p.phi(0, 0), s.phi(z), 1e-14);
        EXPECT_NEAR(p.phi(0, 1), s.q(z), 1e-14);
        EXPECT_NEAR(p.r(0, 0), s.r(z), 1e-14);
    }
}

TEST(Soliton, CDerivativesMatchCentralDifferences) {
    const double c = 1.15, h = 1e-5;
    const SolitonProfile s = soliton_profile(kP, c);
    const SolitonProfile sp = soliton_profile(kP, c + h), sm = soliton_profile(kP, c - h);
    double worst_q = 0.0, worst_phi = 0.0, scale_q = 0.0, scale_phi = 0.0;
    double worst_q2 = 0.0, scale_q2 = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double z = -30.0 + 60.0 * i / 400;
        const ProfilePoint p = s.point(z);
        const double fd_q = (sp.q(z) - sm.q(z)) / (2 * h);
        const double fd_phi = (sp.phi(z) - sm.phi(z)) / (2 * h);
        const double fd_q2 = (sp.point(z).phi(1, 1) - sm.point(z).phi(1, 1)) / (2 * h);
        worst_q = std::max(worst_q, std::abs(p.phi(1, 1) - fd_q));
        worst_phi = std::max(worst_phi, std::abs(p.phi(1, 0) - fd_phi));
        worst_q2 = std::max(worst_q2, std::abs(p.phi(2, 1) - fd_q2));
        scale_q = std::max(scale_q, std::abs(p.phi(1, 1)));
        scale_phi = std::max(scale_phi, std::abs(p.phi(1, 0)));
        scale_q2 = std::max(scale_q2, std::abs(p.phi(2, 1)));
    }
    EXPECT_LE(worst_q, 1e-6 * scale_q);
    EXPECT_LE(worst_phi, 1e-6 * scale_phi);
    EXPECT_LE(worst_q2, 1e-6 * scale_q2);
}

TEST(Soliton, ZDerivativesMatchCentralDifferences) {
    const SolitonProfile s = soliton_profile(kP, 1.4);
    const double h = 1e-4;
    for (double z : {-3.0, 0.4, 2.0}) {
        const ProfilePoint p = s.point(z), pp = s.point(z + h), pm = s.point(z - h);
        for (int j = 1; j <= 4; ++j) EXPECT_NEAR(p.phi(1, j + 1), (pp.phi(1, j) - pm.phi(1, j)) / (2 * h), 1e-7);
    }
}

TEST(Soliton, BetaDerivatives) {
    const double c = 1.1, h = 1e-5;
    const auto bd = soliton_profile(kP, c).beta_derivs();
    const double bp = soliton_profile(kP, c + h).beta(), bm = soliton_profile(kP, c - h).beta();
    EXPECT_NEAR(bd[1], (bp - bm) / (2 * h), 1e-7 * std::abs(bd[1]));
    EXPECT_NEAR(bd[2], (bp - 2 * bd[0] + bm) / (h * h), 1e-3 * std::abs(bd[2]));
}

TEST(LineWave, YIndependentAtZeroAngle) {
    const Grid2D g = make_grid(120, 20, 128, 16);
    const FieldPair f = line_wave_field(g, soliton_profile(kP, 1.2));
    for (int k = 1; k < 16; ++k)
        for (int j = 0; j < 128; ++j) {
            EXPECT_EQ(f.phi1(j, k), f.phi1(j, 0));
            EXPECT_EQ(f.phi2(j, k), f.phi2(j, 0));
        }
    EXPECT_EQ(f.gy, 0.0);
}

TEST(LineWave, ShiftIsPeriodicTranslation) {
    // gamma = 5 equals the gamma = 0 field rolled by 5 (periodic part up to a constant).
    const Grid2D g = make_grid(128, 8, 256, 8);
    const SolitonProfile s = soliton_profile(kP, 1.2);
    const FieldPair f0 = line_wave_field(g, s, 0.0, 0.0), f5 = line_wave_field(g, s, 0.0, 5.0);
    Field2D shifted = apply_multiplier(f0.phi2, [](double xi, double) { return std::exp(cplx(0.0, 5.0 * xi)); });
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(shifted.values()[i] - f5.phi2.values()[i]));
    EXPECT_LE(worst, 1e-10);
    const Field2D p0 = apply_multiplier(f0.phi1, [](double xi, double) { return std::exp(cplx(0.0, 5.0 * xi)); });
    const double offset = f5.phi1(0, 0) - p0(0, 0);
    worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(p0.values()[i] + offset - f5.phi1.values()[i]));
    EXPECT_LE(worst, 1e-10);
}

TEST(LineWave, TimeShiftIsTravel) {
    const Grid2D g = make_grid(128, 8, 256, 8);
    const SolitonProfile s = soliton_profile(kP, 1.2);
    const FieldPair a = line_wave_field(g, s, 0.0, 0.0, 0.7), b = line_wave_field(g, s, 0.0, -1.2 * 0.7, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(a.phi2.values()[i], b.phi2.values()[i]);
}

TEST(LineWave, NarrowBoxRejected) {
    const Grid2D g = make_grid(20, 8, 64, 8);
    EXPECT_THROW(line_wave_field(g, soliton_profile(kP, 1.05)), std::runtime_error);
}

TEST(Psi, MollifierHasUnitMass) {
    double s = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) s += mollifier(-1.0 + 2.0 * (i + 0.5) / n) * 2.0 / n;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NEAR(mollifier_tail(-1.0), 1.0, 1e-15);
    EXPECT_NEAR(mollifier_tail(0.0), 0.5, 1e-14);
    EXPECT_NEAR(mollifier_tail(0.3) + mollifier_tail(-0.3), 1.0, 1e-14);
}

TEST(Psi, TailMatchesDirectQuadrature) {
    for (double x : {-0.9, -0.4, 0.2, 0.75}) {
        double s = 0.0;
        const int n = 200000;
        const double h = (1.0 - x) / n;
        for (int i = 0; i < n; ++i) s += mollifier(x + (i + 0.5) * h) * h;
        EXPECT_NEAR(mollifier_tail(x), s, 1e-10);
    }
}

TEST(Psi, VanishesAtBaseSpeed) {
    const PsiCorrection p = psi_correction(kP, 1.05, 1.05, 10.0);
    for (double z : {-3.0, 0.0, 0.5}) EXPECT_EQ(p.psi_tilde(z), 0.0);
}

TEST(Psi, PlateauMatchesMassDefect) {
    const double c0 = 1.05, c = 1.08;
    const PsiCorrection p = psi_correction(kP, c0, c, 10.0);
    const SolitonProfile s0 = soliton_profile(kP, c0), s = soliton_profile(kP, c);
    // -int (q_c - q_c0) by fine midpoint quadrature on a wide interval.
    double m = 0.0;
    const int n = 400000;
    const double L = 300.0, h = 2 * L / n;
    for (int i = 0; i < n; ++i) {
        const double z = -L + (i + 0.5) * h;
        m -= (s.q(z) - s0.q(z)) * h;
    }
    EXPECT_NEAR(p.psi_tilde(-2.0), m, 1e-10);
    EXPECT_EQ(p.psi_tilde(2.0), 0.0);
}
