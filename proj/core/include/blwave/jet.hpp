#pragma once

#include <array>
#include <cmath>

namespace blwave {

// Truncated bivariate Taylor series in (dc, dz): degree <= NC in dc, <= NZ in dz.
template <int NC, int NZ>
struct Jet {
    static constexpr int W = NZ + 1;
    static constexpr int K = NC + NZ;  // highest total degree
    std::array<double, (NC + 1) * (NZ + 1)> v{};

    static Jet constant(double x) {
        Jet r;
        r.v[0] = x;
        return r;
    }
    static Jet var_c(double c) {
        Jet r;
        r.v[0] = c;
        if constexpr (NC >= 1) r.v[W] = 1.0;
        return r;
    }
    static Jet var_z(double z) {
        Jet r;
        r.v[0] = z;
        if constexpr (NZ >= 1) r.v[1] = 1.0;
        return r;
    }

    double value() const { return v[0]; }
    double coef(int i, int j) const { return v[i * W + j]; }
    // Partial derivative d^i/dc^i d^j/dz^j.
    double deriv(int i, int j) const { return coef(i, j) * fact(i) * fact(j); }

    static double fact(int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    }

    Jet& operator+=(const Jet& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (auto& x : v) x *= s;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) {
        a.v[0] += s;
        return a;
    }
    friend Jet operator-(Jet a, double s) {
        a.v[0] -= s;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i1 = 0; i1 <= NC; ++i1)
            for (int j1 = 0; j1 <= NZ; ++j1) {
                const double x = a.v[i1 * W + j1];
                if (x == 0.0) continue;
                for (int i2 = 0; i1 + i2 <= NC; ++i2)
                    for (int j2 = 0; j1 + j2 <= NZ; ++j2)
                        r.v[(i1 + i2) * W + j1 + j2] += x * b.v[i2 * W + j2];
            }
        return r;
    }

    // f(x) given f^(n)(x0) for n = 0..K.
    static Jet compose(const Jet& x, const std::array<double, K + 1>& fd) {
        Jet h = x;
        h.v[0] = 0.0;
        Jet r = constant(fd[0]);
        Jet p = constant(1.0);
        double nf = 1.0;
        for (int n = 1; n <= K; ++n) {
            p = p * h;
            nf *= n;
            r += p * (fd[n] / nf);
        }
        return r;
    }
};

template <int NC, int NZ>
Jet<NC, NZ> jet_reciprocal(const Jet<NC, NZ>& x) {
    constexpr int K = Jet<NC, NZ>::K;
    std::array<double, K + 1> fd;
    const double x0 = x.value();
    double p = 1.0 / x0;
    for (int n = 0; n <= K; ++n) {
        fd[n] = p;
        p *= -(n + 1) / x0;
    }
    return Jet<NC, NZ>::compose(x, fd);
}

template <int NC, int NZ>
Jet<NC, NZ> jet_sqrt(const Jet<NC, NZ>& x) {
    constexpr int K = Jet<NC, NZ>::K;
    std::array<double, K + 1> fd;
    const double x0 = x.value();
    double e = 0.5;
    double p = std::sqrt(x0);
    for (int n = 0; n <= K; ++n) {
        fd[n] = p;
        p *= e / x0;
        e -= 1.0;
    }
    return Jet<NC, NZ>::compose(x, fd);
}

// Derivatives of tanh at u: tanh^(n) = sech^2(u) Q_n(tanh u) for n >= 1, with
// Q_1 = 1 and Q_{n+1} = Q_n'(T)(1-T^2) - 2T Q_n(T). sech^2 is formed from
// exp(-2|u|) so tails keep full relative accuracy.
template <int K>
std::array<double, K + 1> tanh_derivatives(double u, bool minus_one) {
    std::array<double, K + 1> fd{};
    const double e = std::exp(-2.0 * std::abs(u));
    const double T = std::tanh(u);
    const double S = 4.0 * e / ((1.0 + e) * (1.0 + e));
    fd[0] = minus_one ? (u >= 0.0 ? -2.0 * e / (1.0 + e) : T - 1.0) : T;
    std::array<double, K + 2> q{};  // polynomial coefficients in T
    q[0] = 1.0;
    for (int n = 1; n <= K; ++n) {
        double val = 0.0, tp = 1.0;
        for (int i = 0; i <= K; ++i) {
            val += q[i] * tp;
            tp *= T;
        }
        fd[n] = S * val;
        std::array<double, K + 2> nq{};
        for (int i = 1; i <= K; ++i) {
            // Q' (1 - T^2)
            nq[i - 1] += i * q[i];
            if (i + 1 <= K + 1) nq[i + 1] -= i * q[i];
        }
        for (int i = 0; i <= K; ++i) nq[i + 1] -= 2.0 * q[i];
        q = nq;
    }
    return fd;
}

}  // namespace blwave
