#include "corrscreen/spherecap.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace corrscreen {

namespace {

// 1 − rho² without cancellation near rho = 1.
double one_minus_sq(double rho) { return (1.0 - rho) * (1.0 + rho); }

}  // namespace

void CapParams::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    if (n < 3) throw std::invalid_argument("n must be at least 3, got " + std::to_string(n));
}

double sphere_constant(std::size_t n) {
    if (n < 3) throw std::invalid_argument("a_n needs n >= 3, got " + std::to_string(n));
    const double nd = static_cast<double>(n);
    const double log_ratio = boost::math::lgamma((nd - 1.0) / 2.0) - boost::math::lgamma((nd - 2.0) / 2.0);
    return 2.0 * std::exp(log_ratio) / std::sqrt(std::numbers::pi);
}

CapValue cap_probability(const CapParams& params, CapMethod method) {
    params.validate();
    const double x = one_minus_sq(params.rho);
    const double nd = static_cast<double>(params.n);
    double value = 0.0;
    if (x > 0.0) {
        if (method == CapMethod::exact) {
            value = boost::math::ibeta((nd - 2.0) / 2.0, 0.5, x);
        } else {
            value = sphere_constant(params.n) * std::pow(x, (nd - 2.0) / 2.0) / (nd - 2.0);
        }
    }
    return {std::clamp(value, 0.0, 1.0), method};
}

double p0(double rho, std::size_t n) { return cap_probability({rho, n}, CapMethod::exact).p0; }

double inverse_cap_probability(double target, std::size_t n) {
    if (!(target > 0.0 && target <= 1.0)) throw std::invalid_argument("target probability must lie in (0, 1]");
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    if (target == 1.0) return 0.0;

    double lo = 0.0;  // p0(lo) >= target
    double hi = 1.0;  // p0(hi) <  target
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        if (p0(mid, n) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Whichever bracket end lands closer to the target.
    return std::abs(p0(lo, n) - target) <= std::abs(p0(hi, n) - target) ? lo : hi;
}

}  // namespace corrscreen
