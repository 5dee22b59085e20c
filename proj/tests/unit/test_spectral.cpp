#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

#include "blwave/snapshot.hpp"
#include "blwave/spectral.hpp"

using namespace blwave;

namespace {

Field2D random_smooth(const Grid2D& g, unsigned seed, int kmax) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field2D f(g);
    for (int m = -kmax; m <= kmax; ++m)
        for (int n = -kmax; n <= kmax; ++n) {
            const double a = nd(rng) / (1 + m * m + n * n), ph = nd(rng);
            for (int k = 0; k < g.Ny(); ++k)
                for (int j = 0; j < g.Nx(); ++j)
                    f(j, k) += a * std::cos(2 * std::numbers::pi * (m * g.x(j) / g.Lx() + n * g.y(k) / g.Ly()) + ph);
        }
    return f;
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

double max_abs(const Field2D& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(Grid, DftOrderingOnUnitBox) {
    const Grid2D g = make_grid(2 * std::numbers::pi, 2 * std::numbers::pi, 8, 8);
    const double expect[8] = {0, 1, 2, 3, -4, -3, -2, -1};
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(g.xi()[j], expect[j], 1e-14);
}

TEST(Grid, SpacingIsDerivable) {
    const Grid2D g = make_grid(40, 20, 256, 128);
    EXPECT_NEAR(g.xi()[1], 2 * std::numbers::pi / 40, 1e-15);
    EXPECT_NEAR(g.dx(), 40.0 / 256, 1e-15);
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(make_grid(10, 10, 7, 8), std::invalid_argument);
    EXPECT_THROW(make_grid(-1, 10, 8, 8), std::invalid_argument);
    EXPECT_THROW(make_grid(10, 10, 6, 8), std::invalid_argument);
}

TEST(Transform, RoundTrip) {
    const Grid2D g = make_grid(17.0, 9.0, 64, 32);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Field2D f(g);
    for (auto& v : f.values()) v = u(rng);
    const Field2D back = Field2D::from_spectrum(g, f.spectrum());
    EXPECT_LE(max_abs_diff(f, back), 1e-12 * max_abs(f));
}

TEST(Multiplier, IdentitySymbol) {
    const Grid2D g = make_grid(10, 10, 32, 16);
    const Field2D f = random_smooth(g, 1, 3);
    const Field2D h = apply_multiplier(f, [](double, double) { return cplx(1.0); });
    EXPECT_LE(max_abs_diff(f, h), 1e-13);
}

TEST(Multiplier, BThenBInverseRecoversInput) {
    const double b = 1.0;
    const Grid2D g = make_grid(20, 12, 64, 32);
    const Field2D f = random_smooth(g, 2, 5);
    const Field2D h = apply_multiplier(
        apply_multiplier(f, [&](double x, double y) { return cplx(1 + b * (x * x + y * y)); }),
        [&](double x, double y) { return cplx(1.0 / (1 + b * (x * x + y * y))); });
    EXPECT_LE(max_abs_diff(f, h), 1e-12 * max_abs(f));
}

TEST(Multiplier, AOnUnitPlaneWave) {
    const double a = 0.5;
    const Grid2D g = make_grid(2 * std::numbers::pi, 2 * std::numbers::pi, 16, 16);
    Field2D f(g);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j) f(j, k) = std::cos(g.x(j));
    const Field2D h = apply_multiplier(f, [&](double x, double y) { return cplx(1 + a * (x * x + y * y)); });
    for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_NEAR(h.values()[i], 1.5 * f.values()[i], 1e-13);
}

TEST(Multiplier, NonFiniteSymbolRejected) {
    const Grid2D g = make_grid(10, 10, 8, 8);
    const Field2D f(g);
    EXPECT_THROW(apply_multiplier(f, [](double x, double) { return cplx(1.0 / x); }), std::domain_error);
}

TEST(Multiplier, OddSymbolGivesDerivative) {
    const Grid2D g = make_grid(2 * std::numbers::pi, 2 * std::numbers::pi, 16, 16);
    Field2D f(g);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j) f(j, k) = std::sin(2 * g.x(j)) * std::cos(g.y(k));
    const Field2D h = apply_multiplier(f, [](double x, double) { return cplx(0.0, x); });
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j) EXPECT_NEAR(h(j, k), 2 * std::cos(2 * g.x(j)) * std::cos(g.y(k)), 1e-13);
}

TEST(Dealias, BandLimitedUnchanged) {
    const Grid2D g = make_grid(10, 10, 32, 32);
    const Field2D f = random_smooth(g, 4, 5);
    EXPECT_LE(max_abs_diff(f, dealias(f)), 1e-13);
}

TEST(Dealias, NyquistModeRemoved) {
    const Grid2D g = make_grid(10, 10, 16, 16);
    Field2D f(g);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j) f(j, k) = (j % 2 == 0) ? 1.0 : -1.0;
    EXPECT_LE(max_abs(dealias(f)), 1e-15);
}

TEST(Dealias, ProductMatchesPaddedOracle) {
    // Oracle: evaluate the product on a 2x finer grid (alias free for these
    // bands), then keep only the modes retained on the coarse grid.
    const Grid2D g = make_grid(2 * std::numbers::pi, 2 * std::numbers::pi, 24, 24);
    const Grid2D gf = make_grid(2 * std::numbers::pi, 2 * std::numbers::pi, 48, 48);
    auto u = [](double x, double y) { return std::cos(7 * x + 2 * y) + 0.3 * std::sin(5 * y - 3 * x); };
    auto v = [](double x, double y) { return std::sin(6 * x) - 0.5 * std::cos(7 * y + x); };
    Field2D pu(g), pv(g), prod(g);
    for (int k = 0; k < 24; ++k)
        for (int j = 0; j < 24; ++j) {
            pu(j, k) = u(g.x(j), g.y(k));
            pv(j, k) = v(g.x(j), g.y(k));
        }
    pu = dealias(pu);
    pv = dealias(pv);
    for (std::size_t i = 0; i < prod.values().size(); ++i) prod.values()[i] = pu.values()[i] * pv.values()[i];
    const Field2D coarse = dealias(prod);

    Field2D fine(gf);
    for (int k = 0; k < 48; ++k)
        for (int j = 0; j < 48; ++j) fine(j, k) = u(gf.x(j), gf.y(k)) * v(gf.x(j), gf.y(k));
    // u, v have all modes inside the coarse band (|j| <= 8), so the fine
    // product is exact; keep modes with |j|,|k| <= 8.
    ComplexVec s = fine.spectrum();
    for (int k = 0; k < 48; ++k)
        for (int j = 0; j < gf.Nxh(); ++j) {
            const int sj = std::abs(Grid2D::signed_index(j, 48)), sk = std::abs(Grid2D::signed_index(k, 48));
            if (3 * sj > 24 || 3 * sk > 24) s[std::size_t(k) * gf.Nxh() + j] = 0.0;
        }
    const Field2D proj = Field2D::from_spectrum(gf, s);
    for (int k = 0; k < 24; ++k)
        for (int j = 0; j < 24; ++j) EXPECT_NEAR(coarse(j, k), proj(2 * j, 2 * k), 1e-12);
}

TEST(InnerProduct, ConstantOnBox) {
    const Grid2D g = make_grid(7, 3, 16, 8);
    Field2D one(g);
    for (auto& v : one.values()) v = 1.0;
    EXPECT_NEAR(weighted_inner_product(one, one), 21.0, 1e-12);
}

TEST(InnerProduct, SinCosOrthogonal) {
    const Grid2D g = make_grid(2 * std::numbers::pi, 2 * std::numbers::pi, 32, 8);
    Field2D s(g), c(g);
    for (int k = 0; k < 8; ++k)
        for (int j = 0; j < 32; ++j) {
            s(j, k) = std::sin(g.x(j));
            c(j, k) = std::cos(g.x(j));
        }
    EXPECT_NEAR(weighted_inner_product(s, c), 0.0, 1e-13);
}

TEST(InnerProduct, WeightedGaussiansMatchClosedForm) {
    // int e^{-(x-1)^2} e^{-(x+0.5)^2/2} e^{2 alpha x} dx, completed square.
    const double alpha = 0.3;
    const int n = 4096;
    const double L = 60.0, dx = 2 * L / n;
    std::vector<double> u(n), v(n);
    for (int j = 0; j < n; ++j) {
        const double x = -L + j * dx;
        u[j] = std::exp(-(x - 1) * (x - 1));
        v[j] = std::exp(-0.5 * (x + 0.5) * (x + 0.5));
    }
    const double got = weighted_inner_product(u, v, -L, dx, [&](double x) { return std::exp(2 * alpha * x); });
    // exponent: -1.5 x^2 + (2 - 0.5 + 2 alpha) x - (1 + 0.125)
    const double A = 1.5, B = 1.5 + 2 * alpha, C = 1.125;
    const double exact = std::sqrt(std::numbers::pi / A) * std::exp(B * B / (4 * A) - C);
    EXPECT_NEAR(got, exact, 1e-8 * exact);
}

TEST(InnerProduct, ParsevalAgreement) {
    const Grid2D g = make_grid(13, 11, 32, 32);
    const Field2D u = random_smooth(g, 7, 6), v = random_smooth(g, 8, 6);
    const double p = weighted_inner_product(u, v), s = spectral_inner_product(u, v);
    EXPECT_NEAR(p, s, 1e-10 * std::abs(p));
}

TEST(Properties, MultiplierLinearAndCommutesWithDealias) {
    const Grid2D g = make_grid(9, 9, 32, 32);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
        Field2D u(g), v(g);
        for (auto& x : u.values()) x = ud(rng);
        for (auto& x : v.values()) x = ud(rng);
        const double a = ud(rng), bcoef = 0.5 + std::abs(ud(rng));
        Symbol m = [&](double x, double y) { return cplx(1.0 / (1 + bcoef * (x * x + y * y))); };
        Field2D w(g);
        for (std::size_t i = 0; i < w.values().size(); ++i) w.values()[i] = u.values()[i] + a * v.values()[i];
        const Field2D mw = apply_multiplier(w, m), mu = apply_multiplier(u, m), mv = apply_multiplier(v, m);
        for (std::size_t i = 0; i < w.values().size(); ++i)
            EXPECT_NEAR(mw.values()[i], mu.values()[i] + a * mv.values()[i], 1e-12);
        EXPECT_LE(max_abs_diff(apply_multiplier(dealias(u), m), dealias(apply_multiplier(u, m))), 1e-13);
    }
}

TEST(Snapshot, PairRoundTripIsBitExact) {
    const Grid2D g = make_grid(12.5, 6.25, 16, 8);
    FieldPair p(random_smooth(g, 5, 3), random_smooth(g, 6, 3), 0.125, -0.5);
    const std::string path = ::testing::TempDir() + "pair.blk";
    write_snapshot(path, p);
    const FieldPair q = read_pair_snapshot(path);
    EXPECT_EQ(q.grid(), g);
    EXPECT_EQ(q.gx, p.gx);
    EXPECT_EQ(q.gy, p.gy);
    EXPECT_EQ(0, std::memcmp(q.phi1.values().data(), p.phi1.values().data(), g.size() * 8));
    EXPECT_EQ(0, std::memcmp(q.phi2.values().data(), p.phi2.values().data(), g.size() * 8));
    std::remove(path.c_str());
}

TEST(Snapshot, FieldHeaderLayout) {
    const Grid2D g = make_grid(2.0, 4.0, 8, 10);
    Field2D f(g);
    f(3, 2) = 1.5;
    const std::string path = ::testing::TempDir() + "field.blk";
    write_snapshot(path, f);
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    ASSERT_NE(fp, nullptr);
    unsigned char hdr[28];
    ASSERT_EQ(std::fread(hdr, 1, 28, fp), 28u);
    std::fseek(fp, 0, SEEK_END);
    const long size = std::ftell(fp);
    std::fclose(fp);
    EXPECT_EQ(std::string(reinterpret_cast<char*>(hdr), 4), "BLK1");
    EXPECT_EQ(hdr[4], 8);
    EXPECT_EQ(hdr[8], 10);
    EXPECT_EQ(size, 28 + 8 * 80);
    EXPECT_EQ(read_field_snapshot(path)(3, 2), 1.5);
    EXPECT_THROW(read_pair_snapshot(path), std::runtime_error);
    std::remove(path.c_str());
}
