#include "corrscreen/error.hpp"
#include "corrscreen/phase.hpp"
#include "corrscreen/spherecap.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace corrscreen;

namespace {

// At n = 10 the cap integrand (1-u²)³ is a polynomial; a_10 = 35/16.
double p0_n10(double r) {
    // Integral of (1-u^2)^3 over [r, 1] with t = 1 - u, expanded in t to
    // avoid cancellation near r = 1.
    const double t = 1.0 - r;
    return 35.0 / 16.0 * std::pow(t, 4) * (2.0 - 2.4 * t + t * t - t * t * t / 7.0);
}

}  // namespace

TEST(Phase, ClosedFormOracleAgreesWithLibrary) {
    for (double r : {0.1, 0.5, 0.9, 0.97})
        EXPECT_NEAR(p0(r, 10) / p0_n10(r), 1.0, 1e-12);
}

TEST(Phase, CriticalTableMatchesPublishedValues) {
    const std::vector<std::size_t> ns{550, 500, 450, 150, 100, 50, 10, 8, 6};
    const std::vector<double> published{0.188, 0.197, 0.207, 0.344, 0.413, 0.559, 0.961, 0.988, 0.9997};
    const auto table = critical_table(500, ns);
    ASSERT_EQ(table.size(), ns.size());
    for (std::size_t k = 0; k < ns.size(); ++k) {
        EXPECT_NEAR(table[k].rho[0], published[k], 0.002) << "n=" << ns[k];
        EXPECT_EQ(table[k].kind, ThresholdKind::critical_point);
        EXPECT_EQ(table[k].variant, CriticalVariant::table_matching);
    }
}

TEST(Phase, CriticalThresholdFrozenValues) {
    // sqrt(1 - (m a_n)^{-2/(n-4)} (p-1)^{-2/(n-4)}) evaluated offline.
    const std::vector<std::pair<std::size_t, double>> frozen{
        {550, 0.18809}, {500, 0.19669}, {450, 0.20664}, {150, 0.34370}, {100, 0.41286},
        {50, 0.55881},  {10, 0.96068},  {8, 0.98837},   {6, 0.99967}};
    for (const auto& [n, rho] : frozen) EXPECT_NEAR(critical_threshold_auto(500, n).rho[0], rho, 5e-5) << n;
    EXPECT_NEAR(critical_threshold_auto(500, 10, 1.0, CriticalVariant::literal).rho[0], 0.95020, 5e-5);
    // Direct formula at n = 10: a_10 = 35/16, exponent -1/3.
    const double direct = std::sqrt(1.0 - std::pow(2.0 * 35.0 / 16.0 * 499.0, -1.0 / 3.0));
    EXPECT_NEAR(critical_threshold_auto(500, 10).rho[0], direct, 1e-13);
    // Cross uses p in place of p-1.
    const double cross = std::sqrt(1.0 - std::pow(35.0 / 16.0 * 500.0, -1.0 / 3.0));
    EXPECT_NEAR(critical_threshold_cross(500, 10).rho[0], cross, 1e-13);
}

TEST(Phase, CriticalThresholdValidation) {
    EXPECT_THROW(critical_threshold_auto(500, 4), std::invalid_argument);
    EXPECT_THROW(critical_threshold_auto(1, 10), std::invalid_argument);
    EXPECT_THROW(critical_threshold_auto(500, 10, 0.0), std::invalid_argument);
    EXPECT_THROW(critical_threshold_persistent(500, 10, 12), std::invalid_argument);
    EXPECT_THROW(parse_critical_variant("eq"), std::invalid_argument);
    EXPECT_EQ(parse_critical_variant("table-matching"), CriticalVariant::table_matching);
}

TEST(Phase, CriticalMonotoneInNandP) {
    double prev = 1.0;
    for (std::size_t n = 6; n <= 600; n += 7) {
        const double r = critical_threshold_auto(500, n).rho[0];
        EXPECT_LT(r, prev);
        prev = r;
    }
    prev = 0.0;
    for (std::size_t p : {10u, 100u, 1000u, 10000u, 100000u}) {
        const double r = critical_threshold_auto(p, 20).rho[0];
        EXPECT_GT(r, prev);
        prev = r;
    }
}

// The normalized mean curve has unit negative slope at the critical point.
TEST(Phase, KneeHasUnitSlope) {
    for (std::size_t n : {8u, 10u, 50u, 150u}) {
        for (auto variant : {CriticalVariant::literal, CriticalVariant::table_matching}) {
            const double m = variant == CriticalVariant::literal ? 1.0 : 2.0;
            const double rc = critical_threshold_auto(500, n, 1.0, variant).rho[0];
            const double h = 1e-6;
            const auto curve = [&](double r) { return m * expected_auto_approx(500, n, r) / 500.0; };
            const double slope = (curve(rc + h) - curve(rc - h)) / (2 * h);
            EXPECT_NEAR(slope, -1.0, 1e-5) << "n=" << n;
        }
    }
}

TEST(Phase, ExpectedCounts) {
    const double q = p0_n10(0.97);
    EXPECT_NEAR(q, 3.4178e-6, 1e-9);
    EXPECT_NEAR(expected_auto_exact(500, 10, 0.97), -500.0 * std::expm1(499.0 * std::log1p(-q)), 1e-12);
    EXPECT_NEAR(expected_auto_exact(500, 10, 0.97), 0.85201, 5e-5);
    EXPECT_NEAR(expected_auto_approx(500, 10, 0.97), 500.0 * 499.0 * q, 1e-12);
    EXPECT_NEAR(expected_auto_approx(500, 10, 0.97, 2.0), 2.0 * 500.0 * 499.0 * q, 1e-12);
    EXPECT_NEAR(expected_cross_approx(500, 10, 0.97), 500.0 * 500.0 * q, 1e-12);
    const double ea = expected_auto_approx(500, 10, 0.97), eb = expected_auto_approx(500, 12, 0.9);
    EXPECT_NEAR(expected_persistent_approx(500, {10, 12}, {0.97, 0.9}), ea * eb / 500.0, 1e-12);
    // Exact never exceeds the first-order approximation.
    for (double r : {0.5, 0.8, 0.9, 0.99})
        EXPECT_LE(expected_auto_exact(500, 10, r), expected_auto_approx(500, 10, r) + 1e-12);
    EXPECT_NEAR(expected_auto_exact(500, 10, 0.0), 500.0, 1e-9);
}

TEST(Phase, AutoFwerRoundTrip) {
    for (double alpha : {1e-5, 0.01, 0.05, 0.3})
        for (std::size_t n : {6u, 10u, 35u, 200u}) {
            const auto r = fwer_threshold_auto(500, n, alpha);
            EXPECT_EQ(r.kind, ThresholdKind::fwer_solved);
            EXPECT_NEAR(r.alpha / alpha, 1.0, 1e-8);
            EXPECT_NEAR(r.lambda, -2.0 * std::log1p(-alpha), 1e-8 * r.lambda);
            const auto e = fwer_threshold_auto(500, n, alpha, 1.0, RateModel::exact_mean);
            EXPECT_NEAR(e.alpha / alpha, 1.0, 1e-8);
            EXPECT_EQ(e.rate_model, RateModel::exact_mean);
            EXPECT_NEAR(e.lambda, expected_auto_exact(500, n, e.rho[0]), 1e-8 * e.lambda);
        }
}

TEST(Phase, FwerThresholdMonotoneInAlpha) {
    double prev = 1.0;
    for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.5}) {
        const double r = fwer_threshold_auto(500, 10, alpha).rho[0];
        EXPECT_LT(r, prev);
        prev = r;
    }
}

TEST(Phase, CrossAndPersistentRoundTrip) {
    const auto c = fwer_threshold_cross(500, 20, 0.05);
    EXPECT_NEAR(c.alpha, 0.05, 1e-10);
    EXPECT_NEAR(500.0 * 500.0 * p0(c.rho[0], 20), -std::log(0.95), 1e-10);

    const auto pr = fwer_thresholds_persistent(500, {10, 10}, 0.01);
    ASSERT_EQ(pr.rho.size(), 2u);
    EXPECT_NEAR(pr.alpha, 0.01, 1e-10);
    EXPECT_NEAR(pr.rho[0], 0.9617, 1e-4);
    EXPECT_NEAR(p0(pr.rho[0], 10), 8.985e-6, 1e-8);
    EXPECT_NEAR(pr.treatment_rates[0], pr.treatment_rates[1], 1e-9);

    const auto unequal = fwer_thresholds_persistent(500, {10, 20, 30}, 0.05);
    EXPECT_NEAR(unequal.alpha, 0.05, 1e-10);
    EXPECT_NEAR(unequal.treatment_rates[0], unequal.treatment_rates[2], 1e-9 * unequal.treatment_rates[0]);
    EXPECT_GT(unequal.rho[0], unequal.rho[1]);
    EXPECT_GT(unequal.rho[1], unequal.rho[2]);
}

TEST(Phase, InfeasibleAlpha) {
    EXPECT_THROW(fwer_threshold_auto(2, 3, 0.99), InfeasibleError);
    EXPECT_THROW(fwer_threshold_auto(500, 10, 0.0), std::invalid_argument);
    EXPECT_THROW(fwer_threshold_auto(500, 10, 1.0), std::invalid_argument);
}

TEST(Phase, ImpliedThresholdReport) {
    const auto r = implied_threshold_report(ScreenMode::autocorr, 500, {10}, {0.97});
    EXPECT_EQ(r.kind, ThresholdKind::user);
    EXPECT_NEAR(r.lambda, expected_auto_approx(500, 10, 0.97), 1e-12);
    EXPECT_NEAR(r.alpha, 1.0 - std::exp(-r.lambda / 2.0), 1e-12);
    EXPECT_NEAR(implied_alpha(ScreenMode::cross, 500, {10, 10}, {0.97}),
                1.0 - std::exp(-expected_cross_approx(500, 10, 0.97)), 1e-12);
    EXPECT_THROW(implied_threshold_report(ScreenMode::cross, 500, {10, 12}, {0.9}), DataError);
    const auto j = to_json(r);
    EXPECT_EQ(j["mode"], "auto");
    EXPECT_EQ(j["kind"], "user");
    EXPECT_TRUE(j["variant"].is_null());
}

TEST(Phase, PersistentCriticalReducesToLiteralAuto) {
    const auto r = critical_threshold_persistent(500, 20, 20);
    EXPECT_NEAR(r.rho[0], critical_threshold_auto(500, 20, 1.0, CriticalVariant::literal).rho[0], 1e-14);
    const auto h = critical_threshold_persistent(500, 20, 20, 4.0, 1.0);
    EXPECT_NEAR(h.rho[0], critical_threshold_auto(500, 20, 2.0, CriticalVariant::literal).rho[0], 1e-14);
}

// Balancing equates the asymptotic rates of two treatments.
TEST(Phase, BalancedThresholdEqualizesRates) {
    for (auto [na, nb, rb] : {std::tuple<std::size_t, std::size_t, double>{12, 20, 0.85}, {30, 10, 0.96}, {15, 15, 0.9}}) {
        const double ra = balanced_threshold(rb, nb, na);
        const double lhs = cap_probability({ra, na}, CapMethod::asymptotic).p0;
        const double rhs = cap_probability({rb, nb}, CapMethod::asymptotic).p0;
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
        // Close to the exact-rate solution.
        EXPECT_NEAR(ra, inverse_cap_probability(p0(rb, nb), na), 0.01);
    }
    EXPECT_NEAR(balanced_threshold(0.9, 15, 15), 0.9, 1e-12);
    const double ra = balanced_threshold(0.85, 20, 12, 2.0, 1.0);
    EXPECT_NEAR(2.0 * cap_probability({ra, 12}, CapMethod::asymptotic).p0,
                cap_probability({0.85, 20}, CapMethod::asymptotic).p0, 1e-12);
}
