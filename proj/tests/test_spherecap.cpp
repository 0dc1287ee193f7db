#include "corrscreen/spherecap.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace corrscreen;

namespace {

// Composite Simpson on a_n ∫_rho^1 (1-u²)^{(n-4)/2} du, with a_n from its
// half-integer product form so that log-gamma is not shared with the library.
double sphere_constant_product(std::size_t n) {
    // a_n = 2 Γ((n-1)/2) / (√π Γ((n-2)/2)); step the gamma ratio up from n = 3 or 4.
    double a = (n % 2 == 0) ? 1.0 : 2.0 / std::numbers::pi;
    // a_m / a_{m-2} = (m-3)/(m-4).
    for (std::size_t m = (n % 2 == 0) ? 6 : 5; m <= n; m += 2) {
        const double md = static_cast<double>(m);
        a *= (md - 3.0) / (md - 4.0);
    }
    return a;
}

double simpson_cap(double rho, std::size_t n, int intervals = 200000) {
    const double e = (static_cast<double>(n) - 4.0) / 2.0;
    const auto f = [&](double u) { return std::pow(std::max(0.0, (1.0 - u) * (1.0 + u)), e); };
    const double h = (1.0 - rho) / intervals;
    double s = f(rho) + f(1.0);
    for (int k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * f(rho + k * h);
    return sphere_constant_product(n) * s * h / 3.0;
}

}  // namespace

TEST(SphereCap, ConstantSpecialValues) {
    EXPECT_NEAR(sphere_constant(4), 1.0, 1e-15);
    EXPECT_NEAR(sphere_constant(3), 2.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(sphere_constant(10), 35.0 / 16.0, 1e-13);
    EXPECT_THROW(sphere_constant(2), std::invalid_argument);
}

TEST(SphereCap, ConstantMatchesProductFormAndLargeN) {
    for (std::size_t n : {5u, 6u, 7u, 20u, 35u, 101u, 400u, 1000u})
        EXPECT_NEAR(sphere_constant(n) / sphere_constant_product(n), 1.0, 1e-12) << n;
    // No overflow where Γ itself would.
    EXPECT_TRUE(std::isfinite(sphere_constant(22283)));
    EXPECT_NEAR(sphere_constant(22283) / std::sqrt(2.0 * 22283 / std::numbers::pi), 1.0, 1e-3);
}

TEST(SphereCap, BoundaryValues) {
    for (std::size_t n : {3u, 4u, 10u, 500u}) {
        EXPECT_EQ(p0(1.0, n), 0.0);
        EXPECT_NEAR(p0(0.0, n), 1.0, 1e-15);
    }
    EXPECT_THROW(p0(-0.1, 10), std::invalid_argument);
    EXPECT_THROW(p0(1.1, 10), std::invalid_argument);
    EXPECT_THROW(p0(0.5, 2), std::invalid_argument);
}

TEST(SphereCap, ClosedFormsAtSmallN) {
    for (double r : {0.0, 0.1, 0.5, 0.77, 0.99, 0.9999}) {
        EXPECT_NEAR(p0(r, 3), 2.0 / std::numbers::pi * std::acos(r), 1e-13);
        EXPECT_NEAR(p0(r, 4), 1.0 - r, 1e-13);
        EXPECT_NEAR(p0(r, 5), 2.0 / std::numbers::pi * (std::acos(r) - r * std::sqrt(1 - r * r)), 1e-13);
        EXPECT_NEAR(p0(r, 6), 1.0 - 1.5 * r + 0.5 * r * r * r, 1e-13);
    }
    EXPECT_NEAR(p0(0.5, 3), 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(p0(0.5, 4), 0.5, 1e-14);
}

TEST(SphereCap, MatchesQuadrature) {
    for (std::size_t n : {7u, 10u, 35u, 120u})
        for (double r : {0.05, 0.3, 0.6, 0.9})
            EXPECT_NEAR(p0(r, n) / simpson_cap(r, n), 1.0, 1e-9) << "n=" << n << " rho=" << r;
}

TEST(SphereCap, StrictlyDecreasing) {
    for (std::size_t n : {3u, 5u, 10u, 50u, 500u}) {
        double prev = 2.0;
        for (int k = 0; k <= 200; ++k) {
            const double r = k / 200.0 * (n > 100 ? 0.4 : 0.999);
            const double v = p0(r, n);
            EXPECT_LT(v, prev) << "n=" << n << " rho=" << r;
            prev = v;
        }
    }
}

TEST(SphereCap, AsymptoticAgreesNearOne) {
    for (std::size_t n = 5; n <= 500; n += (n < 20 ? 1 : 37)) {
        for (double x : {0.01, 0.005, 0.001}) {
            const double r = std::sqrt(1.0 - x);
            const double exact = cap_probability({r, n}, CapMethod::exact).p0;
            const double approx = cap_probability({r, n}, CapMethod::asymptotic).p0;
            if (exact == 0.0) continue;
            EXPECT_NEAR(approx / exact, 1.0, 0.01) << "n=" << n << " 1-rho^2=" << x;
        }
    }
    EXPECT_EQ(cap_probability({0.3, 10}, CapMethod::asymptotic).method, CapMethod::asymptotic);
    EXPECT_LE(cap_probability({0.0, 3}, CapMethod::asymptotic).p0, 1.0);
}

TEST(SphereCap, InverseRoundTrip) {
    EXPECT_EQ(inverse_cap_probability(1.0, 10), 0.0);
    EXPECT_NEAR(inverse_cap_probability(0.25, 4), 0.75, 1e-12);
    EXPECT_NEAR(inverse_cap_probability(8.9846e-6, 10), 0.9614, 5e-4);
    for (std::size_t n : {4u, 6u, 10u, 35u, 150u, 550u})
        for (double r : {0.05, 0.2, 0.5, 0.8, 0.95}) {
            const double target = p0(r, n);
            if (target < 1e-300) continue;
            const double back = inverse_cap_probability(target, n);
            EXPECT_NEAR(back, r, 1e-9) << "n=" << n;
            EXPECT_LE(std::abs(p0(back, n) - target), 1e-10 * target);
        }
    EXPECT_THROW(inverse_cap_probability(0.0, 10), std::invalid_argument);
    EXPECT_THROW(inverse_cap_probability(1.5, 10), std::invalid_argument);
}

TEST(SphereCap, MonteCarloUniformPoints) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z;
    const std::size_t n = 10;
    const double rho = 0.4;
    const int draws = 1'000'000;
    int hits = 0;
    double u[9], v[9];
    for (int d = 0; d < draws; ++d) {
        double nu = 0, nv = 0, dot = 0;
        for (int k = 0; k < 9; ++k) {
            u[k] = z(rng);
            v[k] = z(rng);
            nu += u[k] * u[k];
            nv += v[k] * v[k];
            dot += u[k] * v[k];
        }
        if (std::abs(dot) / std::sqrt(nu * nv) > rho) ++hits;
    }
    const double p = p0(rho, n);
    const double se = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(static_cast<double>(hits) / draws, p, 3 * se);
}
