#include "corrscreen/power.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"
#include "corrscreen/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corrscreen {

namespace {

// atanh through log1p keeps precision for rho near 1.
double stable_atanh(double x) { return 0.5 * std::log1p(2.0 * x / (1.0 - x)); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

FisherZMoments fisher_z_moments(double rho_true, std::size_t n) {
    if (n < 4) throw std::invalid_argument("Fisher-Z variance needs n >= 4");
    if (!(std::abs(rho_true) < 1.0)) throw std::invalid_argument("true correlation must satisfy |rho| < 1");
    const double nd = static_cast<double>(n);
    return {stable_atanh(rho_true) + rho_true / (2.0 * (nd - 1.0)), 1.0 / (nd - 3.0)};
}

double detection_power(double rho_threshold, double rho_true, std::size_t n) {
    if (!(rho_threshold > 0.0 && rho_threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    if (!(rho_true >= 0.0 && rho_true < 1.0)) throw std::invalid_argument("true correlation must lie in [0, 1)");
    const auto m = fisher_z_moments(rho_true, n);
    return normal_cdf((m.mean - stable_atanh(rho_threshold)) / std::sqrt(m.variance));
}

std::string_view to_string(PowerConvention c) { return c == PowerConvention::joint ? "joint" : "per_treatment"; }

PowerConvention parse_power_convention(std::string_view text) {
    if (text == "joint") return PowerConvention::joint;
    if (text == "per_treatment" || text == "per-treatment") return PowerConvention::per_treatment;
    throw std::invalid_argument("unknown power convention: " + std::string(text));
}

double min_detectable_correlation(const std::vector<double>& thresholds, const std::vector<std::size_t>& n,
                                  double beta, PowerConvention convention) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (thresholds.empty() || thresholds.size() != n.size())
        throw std::invalid_argument("need one threshold per treatment sample size");

    auto combined = [&](double rho1) {
        double acc = 1.0;
        for (std::size_t t = 0; t < n.size(); ++t) {
            const double pw = detection_power(thresholds[t], rho1, n[t]);
            acc = convention == PowerConvention::joint ? acc * pw : std::min(acc, pw);
        }
        return acc;
    };

    double lo = 0.0;
    double hi = std::nextafter(1.0, 0.0);
    if (combined(hi) < beta) throw InfeasibleError("no correlation below 1 reaches the requested detection probability");
    if (combined(lo) >= beta) return lo;
    while (hi - lo > 1e-13) {
        const double mid = lo + (hi - lo) / 2.0;
        if (combined(mid) >= beta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::vector<PowerCell> power_table(std::size_t p, const std::vector<std::size_t>& n_list,
                                   const std::vector<double>& alpha_list, double beta, PowerConvention convention) {
    if (n_list.empty() || alpha_list.empty()) throw std::invalid_argument("power table needs nonempty n and alpha grids");
    std::vector<PowerCell> cells;
    for (const auto n : n_list) {
        for (const auto alpha : alpha_list) {
            const auto report = fwer_thresholds_persistent(p, {n, n}, alpha);
            PowerCell cell;
            cell.n = n;
            cell.alpha = alpha;
            cell.rho = report.rho.front();
            cell.rho1 = min_detectable_correlation(report.rho, {n, n}, beta, convention);
            cell.beta = beta;
            cell.p = p;
            cells.push_back(cell);
        }
    }
    return cells;
}

std::string power_table_csv(const std::vector<PowerCell>& cells) {
    std::string out = "n,alpha,rho,rho1,beta,p\n";
    for (const auto& c : cells) {
        out += std::to_string(c.n) + ',' + format_real(c.alpha) + ',' + format_real(c.rho) + ',' +
               format_real(c.rho1) + ',' + format_real(c.beta) + ',' + std::to_string(c.p) + '\n';
    }
    return out;
}

nlohmann::json power_table_json(const std::vector<PowerCell>& cells, PowerConvention convention) {
    nlohmann::json j;
    j["power_convention"] = to_string(convention);
    j["cells"] = nlohmann::json::array();
    for (const auto& c : cells)
        j["cells"].push_back({{"n", c.n}, {"alpha", c.alpha}, {"rho", c.rho}, {"rho1", c.rho1}, {"beta", c.beta}, {"p", c.p}});
    return j;
}

}  // namespace corrscreen
