#pragma once

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace corrscreen {

// Bias-corrected normal approximation to Z = atanh(r):
//   mean = atanh(rho) + rho / (2(n−1)),  variance = 1 / (n−3).
struct FisherZMoments {
    double mean;
    double variance;
};

FisherZMoments fisher_z_moments(double rho_true, std::size_t n);

// P(r > rho_threshold) for a pair with true correlation rho_true, under the
// Fisher-Z normal approximation.
double detection_power(double rho_threshold, double rho_true, std::size_t n);

// How the per-treatment detection probabilities combine against beta.
//   joint:         ∏_t power_t >= beta  (every treatment's screen must fire)
//   per_treatment: min_t power_t >= beta
enum class PowerConvention { joint, per_treatment };

std::string_view to_string(PowerConvention c);
PowerConvention parse_power_convention(std::string_view text);

// Smallest true correlation detected with probability at least beta.
// Throws InfeasibleError if no rho1 < 1 qualifies.
double min_detectable_correlation(const std::vector<double>& thresholds, const std::vector<std::size_t>& n,
                                  double beta, PowerConvention convention = PowerConvention::joint);

struct PowerCell {
    std::size_t n = 0;   // samples per treatment
    double alpha = 0.0;  // FWER target
    double rho = 0.0;    // solved persistent threshold
    double rho1 = 0.0;   // minimum detectable correlation
    double beta = 0.0;
    std::size_t p = 0;
};

// For every (n, alpha): equal-n two-treatment persistent threshold, then the
// minimum detectable correlation. Cells are ordered n-major.
std::vector<PowerCell> power_table(std::size_t p, const std::vector<std::size_t>& n_list,
                                   const std::vector<double>& alpha_list, double beta,
                                   PowerConvention convention = PowerConvention::joint);

// Columns n,alpha,rho,rho1,beta,p.
std::string power_table_csv(const std::vector<PowerCell>& cells);
nlohmann::json power_table_json(const std::vector<PowerCell>& cells, PowerConvention convention);

}  // namespace corrscreen
