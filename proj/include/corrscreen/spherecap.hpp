#pragma once

#include <cstddef>

namespace corrscreen {

// Threshold/sample-count pair for the null exceedance probability P0(rho, n):
// the chance that |UᵀV| > rho for independent uniform U, V on S_{n−2}.
struct CapParams {
    double rho;
    std::size_t n;

    // Throws std::invalid_argument unless 0 <= rho <= 1 and n >= 3.
    void validate() const;
};

enum class CapMethod { exact, asymptotic };

struct CapValue {
    double p0;
    CapMethod method;
};

// a_n = 2Γ((n−1)/2) / (√π Γ((n−2)/2)), evaluated through log-gamma.
double sphere_constant(std::size_t n);

// exact:      a_n ∫_rho^1 (1−u²)^{(n−4)/2} du = I_{1−rho²}((n−2)/2, 1/2)
// asymptotic: a_n (1−rho²)^{(n−2)/2} / (n−2)
// Both clamped to [0, 1].
CapValue cap_probability(const CapParams& params, CapMethod method = CapMethod::exact);

// Shorthand for the exact value.
double p0(double rho, std::size_t n);

// Bisection on rho for the strictly decreasing map rho -> P0(rho, n).
// Requires 0 < target <= 1.
double inverse_cap_probability(double target, std::size_t n);

}  // namespace corrscreen
