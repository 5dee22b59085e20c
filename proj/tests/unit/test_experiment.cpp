#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "blwave/experiment.hpp"
#include "blwave/lab.hpp"

using namespace blwave;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("blwave_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.Lx = 100.0;
    c.Ly = 128.0;
    c.Nx = 256;
    c.Ny = 32;
    c.grid1d_N = 256;
    c.dt = 0.05;
    c.T = 1.0;
    c.snapshot_every = 10;
    c.bootstrap = 50;
    return c;
}

std::vector<double> log_times(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a * std::pow(b / a, double(i) / (n - 1));
    return t;
}

}  // namespace

TEST(Fit, ExactPowerLaw) {
    const auto t = log_times(10.0, 1e4, 40);
    std::vector<double> v;
    for (double s : t) v.push_back(2.0 * std::pow(s, -0.25));
    const FitResult f = fit_decay_exponent(t, v, 10.0, 1e4);
    EXPECT_NEAR(f.slope, -0.25, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(2.0), 1e-10);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    EXPECT_EQ(f.n, 40);
}

TEST(Fit, LogPeriodicRipple) {
    const auto t = log_times(10.0, 1e5, 80);
    std::vector<double> v;
    for (double s : t) v.push_back(3.0 * std::pow(s, -0.75) * (1.0 + 0.1 * std::sin(std::log(s))));
    const FitResult f = fit_decay_exponent(t, v, 10.0, 1e5);
    EXPECT_NEAR(f.slope, -0.75, 0.05);
    EXPECT_LE(f.ci_low, f.slope);
    EXPECT_GE(f.ci_high, f.slope);
}

TEST(Fit, ConstantHasZeroSlope) {
    const auto t = log_times(1.0, 100.0, 25);
    const FitResult f = fit_decay_exponent(t, std::vector<double>(t.size(), 0.3), 1.0, 100.0);
    EXPECT_NEAR(f.slope, 0.0, 1e-12);
}

TEST(Fit, SeedDeterminesBootstrap) {
    const auto t = log_times(1.0, 100.0, 30);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 0.05);
    std::vector<double> v;
    for (double s : t) v.push_back(std::pow(s, -0.5) * std::exp(n(rng)));
    const FitResult a = fit_decay_exponent(t, v, 1.0, 100.0, 200, 3);
    const FitResult b = fit_decay_exponent(t, v, 1.0, 100.0, 200, 3);
    EXPECT_EQ(a.ci_low, b.ci_low);
    EXPECT_EQ(a.ci_high, b.ci_high);
}

TEST(Fit, RejectsShortOrNonPositiveWindows) {
    const auto t = log_times(1.0, 100.0, 30);
    std::vector<double> v(t.size(), 1.0);
    EXPECT_THROW(fit_decay_exponent(t, v, 1.0, 2.0), std::invalid_argument);
    v[3] = 0.0;
    EXPECT_THROW(fit_decay_exponent(t, v, 1.0, 100.0), std::invalid_argument);
}

TEST(Csv, RoundTripIsExact) {
    SeriesRecord r;
    r.add("t", "s", {0.0, 0.1, 1.0 / 3.0});
    r.add("value, quoted", "m \"x\"", {1e-300, -2.5, std::numbers::pi});
    FitResult f;
    f.slope = -0.25;
    r.fits.push_back({"value, quoted", f});
    const auto p = scratch("csv.csv");
    export_series(r, p.string());
    const SeriesRecord q = read_series_csv(p.string());
    ASSERT_EQ(q.columns.size(), 2u);
    EXPECT_EQ(q.at("value, quoted").unit, "m \"x\"");
    EXPECT_EQ(q.at("value, quoted").values, r.at("value, quoted").values);
    EXPECT_EQ(q.at("t").values, r.at("t").values);
    EXPECT_TRUE(std::filesystem::exists(p.string() + ".fits.csv"));
}

TEST(Csv, EmptyRecord) {
    const auto p = scratch("empty.csv");
    export_series(SeriesRecord{}, p.string());
    EXPECT_TRUE(read_series_csv(p.string()).columns.empty());
}

TEST(Csv, UnwritablePathThrows) {
    EXPECT_THROW(export_series(SeriesRecord{}, "/nonexistent_dir/x.csv"), std::runtime_error);
}

TEST(Config, ParsesCommentsAndQuotes) {
    const KeyValueConfig kv = KeyValueConfig::parse("# header\nc0 = 1.1  # speed\nperturbation = \"resonant-mode\"\n");
    EXPECT_EQ(kv.get_double("c0", 0.0), 1.1);
    EXPECT_EQ(kv.get_string("perturbation", ""), "resonant-mode");
    EXPECT_EQ(kv.get_int("Nx", 7), 7);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(ExperimentConfig::from_kv(KeyValueConfig::parse("c00 = 1.1\n")), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::from_kv(KeyValueConfig::parse("c0 = 0.9\n")), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::from_kv(KeyValueConfig::parse("perturbation = wiggle\n")), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::from_kv(KeyValueConfig::parse("dt = 0.03\nT = 1\n")), std::invalid_argument);
}

TEST(Config, RoundTripThroughText) {
    ExperimentConfig c = small_config();
    c.perturbation = Perturbation::ResonantMode;
    c.epsilon = 2.5e-4;
    c.seed = 99;
    const ExperimentConfig d = ExperimentConfig::from_kv(KeyValueConfig::parse(c.to_kv().dump()));
    EXPECT_EQ(d.to_kv().dump(), c.to_kv().dump());
    EXPECT_EQ(d.perturbation, Perturbation::ResonantMode);
    EXPECT_EQ(d.epsilon, 2.5e-4);
}

TEST(Perturbation, LeftGoingBumpIsXDerivative) {
    ExperimentConfig c = small_config();
    c.perturbation = Perturbation::LeftGoingBump;
    c.bump_x0 = 5.0;
    EXPECT_EQ(parse_perturbation("left-going-bump"), Perturbation::LeftGoingBump);
    const ModulationCoefficients mc = modulation_coefficients(c.phys, c.c0, default_grid1d(c.phys, c.c0, -1.0, 256));
    // Five-point difference of phi1 against phi2; the error must fall as dx^4.
    auto err_at = [&](int nx) {
        const Grid2D g = make_grid(c.Lx, c.Ly, nx, c.Ny);
        const FieldPair u = make_perturbation(c, mc, g);
        const double dx = g.dx();
        double err = 0.0;
        for (int k = 0; k < c.Ny; ++k)
            for (int j = 2; j < nx - 2; ++j) {
                const double d =
                    (-u.phi1(j + 2, k) + 8.0 * u.phi1(j + 1, k) - 8.0 * u.phi1(j - 1, k) + u.phi1(j - 2, k)) / (12.0 * dx);
                err = std::max(err, std::abs(d - u.phi2(j, k)));
            }
        return err;
    };
    const double e1 = err_at(256), e2 = err_at(512);
    EXPECT_LE(e1, 1e-3 * c.epsilon);
    EXPECT_NEAR(e1 / e2, 16.0, 2.0);
}

TEST(Perturbation, ResonantProfileHasUnitIntegral) {
    ExperimentConfig c = small_config();
    c.perturbation = Perturbation::ResonantMode;
    c.epsilon = 1.0;
    const ModulationCoefficients mc = modulation_coefficients(c.phys, c.c0, default_grid1d(c.phys, c.c0, -1.0, 256));
    const Grid2D g = make_grid(c.Lx, c.Ly, c.Nx, c.Ny);
    const FieldPair u = make_perturbation(c, mc, g);
    // The y profile integrates to 1, so the column sums over y equal the x profile d_c r.
    const SolitonProfile sp(c.phys, c.c0);
    for (int j : {c.Nx / 2 - 10, c.Nx / 2, c.Nx / 2 + 7}) {
        double s = 0.0;
        for (int k = 0; k < c.Ny; ++k) s += u.phi2(j, k) * g.dy();
        EXPECT_NEAR(s, sp.point(g.x(j)).r(1, 0), 1e-12);
    }
}

TEST(Experiment, ZeroPerturbationGivesZeroModulation) {
    ExperimentConfig c = small_config();
    c.epsilon = 0.0;
    // On this short box the sponge reaches the soliton tail (r_c ~ 1e-6 at |x| = 30).
    c.sponge.strength = 0.0;
    const ExperimentResult r = run_experiment(c, "");
    ASSERT_EQ(r.track.samples.size(), 3u);
    EXPECT_EQ(r.init_norm, 0.0);
    for (const auto& s : r.track.samples) {
        EXPECT_LE(s.c_norm, 1e-9);
        EXPECT_LE(s.gamma_sup, 1e-9);
    }
    for (double v : r.residual) EXPECT_LE(v, 1e-10);
}

TEST(Experiment, RerunIsBitIdenticalAndManifestRoundTrips) {
    ExperimentConfig c = small_config();
    c.epsilon = 1e-3;
    const auto d1 = scratch("exp1"), d2 = scratch("exp2");
    const ExperimentResult a = run_experiment(c, d1.string());
    const ExperimentResult b = run_experiment(c, d2.string());
    for (const char* f : {"modulation.csv", "decomposition.csv", "energy.csv", "final_profile.csv", "coefficients.txt"}) {
        std::ifstream fa(d1 / f), fb(d2 / f);
        ASSERT_TRUE(fa && fb) << f;
        const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
        EXPECT_EQ(sa, sb) << f;
    }
    EXPECT_EQ(a.track.ctil, b.track.ctil);
    const ExperimentConfig back = ExperimentConfig::load((d1 / "manifest.toml").string());
    EXPECT_EQ(back.to_kv().dump(), c.to_kv().dump());
    const KeyValueConfig man = KeyValueConfig::load((d1 / "manifest.toml").string());
    EXPECT_NEAR(man.get_double("derived.lambda1", 0.0), a.coefficients.lambda1, 1e-15);
    EXPECT_GT(a.init_norm, 0.0);
}
