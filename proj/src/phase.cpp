#include "corrscreen/phase.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/spherecap.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace corrscreen {

std::string_view to_string(ThresholdKind kind) {
    switch (kind) {
        case ThresholdKind::critical_point: return "critical_point";
        case ThresholdKind::fwer_solved: return "fwer_solved";
        case ThresholdKind::user: return "user";
    }
    return "?";
}

std::string_view to_string(CriticalVariant variant) {
    return variant == CriticalVariant::literal ? "literal" : "table_matching";
}

std::string_view to_string(RateModel model) {
    return model == RateModel::asymptotic ? "asymptotic" : "exact_mean";
}

CriticalVariant parse_critical_variant(std::string_view text) {
    if (text == "literal") return CriticalVariant::literal;
    if (text == "table_matching" || text == "table-matching") return CriticalVariant::table_matching;
    throw std::invalid_argument("unknown critical-threshold variant: " + std::string(text));
}

nlohmann::json to_json(const ThresholdReport& r) {
    nlohmann::json j;
    j["mode"] = to_string(r.mode);
    j["rho"] = r.rho;
    j["lambda"] = r.lambda;
    j["alpha"] = r.alpha;
    j["kind"] = to_string(r.kind);
    j["variant"] = r.variant ? nlohmann::json(to_string(*r.variant)) : nlohmann::json(nullptr);
    j["rate_model"] = to_string(r.rate_model);
    if (!r.treatment_rates.empty()) j["treatment_rates"] = r.treatment_rates;
    j["p"] = r.p;
    j["n"] = r.n;
    return j;
}

namespace {

double pd(std::size_t v) { return static_cast<double>(v); }

void check_p(std::size_t p) {
    if (p < 2) throw std::invalid_argument("need p >= 2 variables");
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

void check_J(double J) {
    if (!(J > 0.0) || !std::isfinite(J)) throw std::invalid_argument("J must be positive and finite");
}

std::vector<double> resolve_J(const std::vector<double>& J, std::size_t m) {
    if (J.empty()) return std::vector<double>(m, 1.0);
    if (J.size() != m) throw std::invalid_argument("need one J value per treatment");
    for (double v : J) check_J(v);
    return J;
}

// alpha = 1 − exp(−Λ/2) (auto) or 1 − exp(−Λ) (cross, persistent).
double alpha_from_lambda(ScreenMode mode, double lambda) {
    return mode == ScreenMode::autocorr ? -std::expm1(-lambda / 2.0) : -std::expm1(-lambda);
}

double lambda_from_alpha(ScreenMode mode, double alpha) {
    const double l = -std::log1p(-alpha);
    return mode == ScreenMode::autocorr ? 2.0 * l : l;
}

double rho_for_probability(double target, std::size_t n) {
    if (!(target > 0.0)) throw InfeasibleError("required exceedance probability underflows to zero");
    if (target > 1.0)
        throw InfeasibleError("no threshold in (0,1) reaches the requested error rate (needs P0 = " +
                              std::to_string(target) + " > 1)");
    return inverse_cap_probability(target, n);
}

double critical_rho(double p_eff, std::size_t n, double scale) {
    if (n <= 4) throw std::invalid_argument("critical threshold needs n > 4, got " + std::to_string(n));
    const double e = -2.0 / (pd(n) - 4.0);
    const double c = std::pow(scale * sphere_constant(n), e);
    const double x = c * std::pow(p_eff, e);
    if (!(x < 1.0)) throw InfeasibleError("critical threshold undefined: c_n (p-1)^{-2/(n-4)} >= 1");
    return std::sqrt(1.0 - x);
}

double variant_multiplier(CriticalVariant v) { return v == CriticalVariant::table_matching ? 2.0 : 1.0; }

}  // namespace

double expected_auto_exact(std::size_t p, std::size_t n, double rho) {
    check_p(p);
    const double q = p0(rho, n);
    if (q >= 1.0) return pd(p);
    return -pd(p) * std::expm1((pd(p) - 1.0) * std::log1p(-q));
}

double expected_auto_approx(std::size_t p, std::size_t n, double rho, double J) {
    check_p(p);
    if (J < 0.0) throw std::invalid_argument("J must be nonnegative");
    return pd(p) * (pd(p) - 1.0) * p0(rho, n) * J;
}

double expected_cross_approx(std::size_t p, std::size_t n, double rho, double J) {
    check_p(p);
    if (J < 0.0) throw std::invalid_argument("J must be nonnegative");
    return pd(p) * pd(p) * p0(rho, n) * J;
}

double expected_persistent_approx(std::size_t p, const std::vector<std::size_t>& n, const std::vector<double>& rho,
                                  const std::vector<double>& J) {
    const std::size_t m = n.size();
    if (m < 1 || rho.size() != m) throw std::invalid_argument("need one n and one rho per treatment");
    const auto Js = resolve_J(J, m);
    double log_rate = -(pd(m) - 1.0) * std::log(pd(p));
    for (std::size_t t = 0; t < m; ++t) {
        const double e = expected_auto_approx(p, n[t], rho[t], Js[t]);
        if (e <= 0.0) return 0.0;
        log_rate += std::log(e);
    }
    return std::exp(log_rate);
}

ThresholdReport implied_threshold_report(ScreenMode mode, std::size_t p, const std::vector<std::size_t>& n,
                                         const std::vector<double>& rho, const std::vector<double>& J,
                                         RateModel model) {
    check_p(p);
    ThresholdReport r;
    r.mode = mode;
    r.p = p;
    r.n = n;
    r.rho = rho;
    r.rate_model = model;
    r.kind = ThresholdKind::user;
    switch (mode) {
        case ScreenMode::autocorr: {
            if (n.size() != 1 || rho.size() != 1) throw std::invalid_argument("auto screen takes one n and one rho");
            const double Jv = resolve_J(J, 1)[0];
            if (model == RateModel::exact_mean) {
                const double q = std::min(1.0, p0(rho[0], n[0]) * Jv);
                r.lambda = q >= 1.0 ? pd(p) : -pd(p) * std::expm1((pd(p) - 1.0) * std::log1p(-q));
            } else {
                r.lambda = expected_auto_approx(p, n[0], rho[0], Jv);
            }
            break;
        }
        case ScreenMode::cross: {
            if (rho.size() != 1 || n.empty()) throw std::invalid_argument("cross screen takes one rho");
            if (n.size() == 2 && n[0] != n[1]) throw DataError("cross screen requires n_a = n_b");
            r.lambda = expected_cross_approx(p, n[0], rho[0], resolve_J(J, 1)[0]);
            break;
        }
        case ScreenMode::persistent: {
            if (n.size() < 2) throw std::invalid_argument("persistent screen needs at least two treatments");
            const auto Js = resolve_J(J, n.size());
            for (std::size_t t = 0; t < n.size(); ++t)
                r.treatment_rates.push_back(expected_auto_approx(p, n[t], rho.at(t), Js[t]));
            r.lambda = expected_persistent_approx(p, n, rho, Js);
            break;
        }
    }
    r.alpha = alpha_from_lambda(mode, r.lambda);
    return r;
}

double implied_alpha(ScreenMode mode, std::size_t p, const std::vector<std::size_t>& n, const std::vector<double>& rho,
                     const std::vector<double>& J, RateModel model) {
    return implied_threshold_report(mode, p, n, rho, J, model).alpha;
}

ThresholdReport critical_threshold_auto(std::size_t p, std::size_t n, double J, CriticalVariant variant) {
    check_p(p);
    check_J(J);
    const double rho = critical_rho(pd(p) - 1.0, n, variant_multiplier(variant) * J);
    auto r = implied_threshold_report(ScreenMode::autocorr, p, {n}, {rho}, {J});
    r.kind = ThresholdKind::critical_point;
    r.variant = variant;
    return r;
}

ThresholdReport critical_threshold_cross(std::size_t p, std::size_t n, double J, CriticalVariant variant) {
    check_p(p);
    check_J(J);
    const double rho = critical_rho(pd(p), n, variant_multiplier(variant) * J);
    auto r = implied_threshold_report(ScreenMode::cross, p, {n}, {rho}, {J});
    r.kind = ThresholdKind::critical_point;
    r.variant = variant;
    return r;
}

ThresholdReport critical_threshold_persistent(std::size_t p, std::size_t n_a, std::size_t n_b, double H2a,
                                              double H2b) {
    check_p(p);
    if (n_a != n_b) throw std::invalid_argument("persistent critical threshold needs equal n in both treatments");
    if (!(H2a >= 1.0) || !(H2b >= 1.0)) throw std::invalid_argument("H2 values must be >= 1");
    const double rho = critical_rho(pd(p) - 1.0, n_a, std::sqrt(H2a * H2b));
    auto r = implied_threshold_report(ScreenMode::persistent, p, {n_a, n_b}, {rho, rho});
    r.kind = ThresholdKind::critical_point;
    r.variant = CriticalVariant::literal;
    return r;
}

std::vector<ThresholdReport> critical_table(std::size_t p, const std::vector<std::size_t>& n_list,
                                            CriticalVariant variant, double J) {
    std::vector<ThresholdReport> out;
    out.reserve(n_list.size());
    for (auto n : n_list) out.push_back(critical_threshold_auto(p, n, J, variant));
    return out;
}

ThresholdReport fwer_threshold_auto(std::size_t p, std::size_t n, double alpha, double J, RateModel model) {
    check_p(p);
    check_alpha(alpha);
    check_J(J);
    const double lambda = lambda_from_alpha(ScreenMode::autocorr, alpha);
    double target = 0.0;
    if (model == RateModel::asymptotic) {
        target = lambda / (pd(p) * (pd(p) - 1.0) * J);
    } else {
        if (!(lambda < pd(p))) throw InfeasibleError("requested error rate exceeds the saturated mean p");
        target = -std::expm1(std::log1p(-lambda / pd(p)) / (pd(p) - 1.0)) / J;
    }
    const double rho = rho_for_probability(target, n);
    auto r = implied_threshold_report(ScreenMode::autocorr, p, {n}, {rho}, {J}, model);
    r.kind = ThresholdKind::fwer_solved;
    return r;
}

ThresholdReport fwer_threshold_cross(std::size_t p, std::size_t n, double alpha, double J) {
    check_p(p);
    check_alpha(alpha);
    check_J(J);
    const double lambda = lambda_from_alpha(ScreenMode::cross, alpha);
    const double rho = rho_for_probability(lambda / (pd(p) * pd(p) * J), n);
    auto r = implied_threshold_report(ScreenMode::cross, p, {n}, {rho}, {J});
    r.kind = ThresholdKind::fwer_solved;
    return r;
}

ThresholdReport fwer_thresholds_persistent(std::size_t p, const std::vector<std::size_t>& n, double alpha,
                                           const std::vector<double>& J) {
    check_p(p);
    check_alpha(alpha);
    const std::size_t m = n.size();
    if (m < 2) throw std::invalid_argument("persistent thresholds need at least two treatments");
    const auto Js = resolve_J(J, m);
    const double lambda = lambda_from_alpha(ScreenMode::persistent, alpha);
    // Equal per-treatment rates E with E^m / p^{m-1} = Λ.
    const double rate = std::exp((std::log(lambda) + (pd(m) - 1.0) * std::log(pd(p))) / pd(m));
    std::vector<double> rho;
    for (std::size_t t = 0; t < m; ++t) rho.push_back(rho_for_probability(rate / (pd(p) * (pd(p) - 1.0) * Js[t]), n[t]));
    auto r = implied_threshold_report(ScreenMode::persistent, p, n, rho, Js);
    r.kind = ThresholdKind::fwer_solved;
    return r;
}

double balanced_threshold(double rho_b, std::size_t n_b, std::size_t n_a, double J_a, double J_b) {
    if (n_a < 3 || n_b < 3) throw std::invalid_argument("n must be at least 3");
    check_J(J_a);
    check_J(J_b);
    const double xb = (1.0 - rho_b) * (1.0 + rho_b);
    const double na = pd(n_a) - 2.0;
    const double nb = pd(n_b) - 2.0;
    const double ratio = (na * sphere_constant(n_b) * J_b) / (nb * sphere_constant(n_a) * J_a);
    const double xa = std::pow(xb, nb / na) * std::pow(ratio, 2.0 / na);
    if (!(xa <= 1.0)) throw InfeasibleError("balanced threshold falls below zero");
    return std::sqrt(1.0 - xa);
}

}  // namespace corrscreen
