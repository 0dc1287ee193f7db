#pragma once

#include "corrscreen/screen.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace corrscreen {

// Where a threshold came from.
enum class ThresholdKind { critical_point, fwer_solved, user };

// Constant in the critical-threshold formula
//   rho_c = sqrt(1 − c_n (p−1)^{−2/(n−4)}),  c_n = (m · a_n · J)^{−2/(n−4)}.
// literal: m = 1, i.e. the point where p^{-1} dE[N]/drho = −1 for
//          E[N] = p(p−1) P0 J.
// table_matching: m = 2; this is the variant that reproduces the published
//          critical-threshold table (0.961 at p=500, n=10).
enum class CriticalVariant { literal, table_matching };

// Poisson rate used by the FWER solvers. asymptotic: Λ = p(p−1)·P0·J.
// exact_mean: Λ = p(1 − (1 − P0·J)^{p−1}), the exact mean for i.i.d.
// uniform U-scores (auto screens only).
enum class RateModel { asymptotic, exact_mean };

std::string_view to_string(ThresholdKind kind);
std::string_view to_string(CriticalVariant variant);
std::string_view to_string(RateModel model);
CriticalVariant parse_critical_variant(std::string_view text);

struct ThresholdReport {
    ScreenMode mode = ScreenMode::autocorr;
    std::vector<double> rho;  // one per treatment (a single entry for auto/cross)
    double lambda = 0.0;      // Poisson rate Λ
    double alpha = 0.0;       // implied FWER
    ThresholdKind kind = ThresholdKind::user;
    std::optional<CriticalVariant> variant;
    RateModel rate_model = RateModel::asymptotic;
    std::vector<double> treatment_rates;  // persistent: per-treatment E[N^{t_j}]
    std::size_t p = 0;
    std::vector<std::size_t> n;
};

nlohmann::json to_json(const ThresholdReport& report);

// --- expected discovery counts --------------------------------------------

// p(1 − (1 − P0)^{p−1}), evaluated with log1p/expm1.
double expected_auto_exact(std::size_t p, std::size_t n, double rho);
// p(p−1)·P0(rho, n)·J.
double expected_auto_approx(std::size_t p, std::size_t n, double rho, double J = 1.0);
// p²·P0(rho, n)·J.
double expected_cross_approx(std::size_t p, std::size_t n, double rho, double J = 1.0);
// ∏_j E[N^{t_j}] / p^{m−1} with per-treatment asymptotic rates.
double expected_persistent_approx(std::size_t p, const std::vector<std::size_t>& n,
                                  const std::vector<double>& rho, const std::vector<double>& J = {});

// --- critical thresholds (require n > 4) ----------------------------------

ThresholdReport critical_threshold_auto(std::size_t p, std::size_t n, double J = 1.0,
                                        CriticalVariant variant = CriticalVariant::table_matching);
ThresholdReport critical_threshold_cross(std::size_t p, std::size_t n, double J = 1.0,
                                         CriticalVariant variant = CriticalVariant::literal);
// Equal n in both treatments; H2 values >= 1 (1 for uniform U-scores).
ThresholdReport critical_threshold_persistent(std::size_t p, std::size_t n_a, std::size_t n_b, double H2a = 1.0,
                                              double H2b = 1.0);

// Critical thresholds over a list of sample sizes (one report per n).
std::vector<ThresholdReport> critical_table(std::size_t p, const std::vector<std::size_t>& n_list,
                                            CriticalVariant variant = CriticalVariant::table_matching,
                                            double J = 1.0);

// --- FWER-controlling thresholds -------------------------------------------

// Solves Λ(rho) = −2 ln(1 − alpha) for the auto screen.
ThresholdReport fwer_threshold_auto(std::size_t p, std::size_t n, double alpha, double J = 1.0,
                                    RateModel model = RateModel::asymptotic);
// Solves p² P0 J = −ln(1 − alpha).
ThresholdReport fwer_threshold_cross(std::size_t p, std::size_t n, double alpha, double J = 1.0);
// Per-treatment thresholds with equal rates E[N^{t_j}] whose product rate
// ∏ E / p^{m−1} equals −ln(1 − alpha). Needs m >= 2 treatments.
ThresholdReport fwer_thresholds_persistent(std::size_t p, const std::vector<std::size_t>& n, double alpha,
                                           const std::vector<double>& J = {});

// Threshold for treatment a giving the same asymptotic rate as threshold
// rho_b gives treatment b:
//   1 − rho_a² = (1 − rho_b²)^{(n_b−2)/(n_a−2)} ·
//                ((n_a−2) a_{n_b} J_b / ((n_b−2) a_{n_a} J_a))^{2/(n_a−2)}
double balanced_threshold(double rho_b, std::size_t n_b, std::size_t n_a, double J_a = 1.0, double J_b = 1.0);

// --- forward map -------------------------------------------------------------

// Poisson rate and implied FWER of the given thresholds. Exact inverse of
// the three solvers under the same rate model.
ThresholdReport implied_threshold_report(ScreenMode mode, std::size_t p, const std::vector<std::size_t>& n,
                                         const std::vector<double>& rho, const std::vector<double>& J = {},
                                         RateModel model = RateModel::asymptotic);
double implied_alpha(ScreenMode mode, std::size_t p, const std::vector<std::size_t>& n,
                     const std::vector<double>& rho, const std::vector<double>& J = {},
                     RateModel model = RateModel::asymptotic);

}  // namespace corrscreen
