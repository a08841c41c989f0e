// quadrature.hpp - cumulative integrals on a uniform grid

#pragma once

#include "adlab/types.hpp"

#include <stdexcept>
#include <string_view>

namespace adlab {

enum class Quadrature {
    Trapezoid,   // O(dt^2), default everywhere
    Richardson,  // trapezoid refined against the doubled step: composite Simpson, O(dt^4)
};

inline Quadrature parse_quadrature(std::string_view name) {
    if (name == "trapezoid") return Quadrature::Trapezoid;
    if (name == "richardson") return Quadrature::Richardson;
    throw std::invalid_argument("unknown quadrature '" + std::string(name) + "'");
}

inline const char* to_string(Quadrature q) {
    return q == Quadrature::Trapezoid ? "trapezoid" : "richardson";
}

// F[k] = integral of f from t_0 to t_k; F[0] = 0. Works for real and complex samples.
template <class Vec, class Real>
Vec cumulative_integral(const Vec& f, Real dt, Quadrature q = Quadrature::Trapezoid) {
    using S = typename Vec::Scalar;
    const Index n = f.size();
    Vec out = Vec::Zero(n);
    if (n < 2) return out;

    if (q == Quadrature::Trapezoid || n < 3) {
        for (Index k = 1; k < n; ++k) {
            out[k] = out[k - 1] + S(dt / 2) * (f[k - 1] + f[k]);
        }
        return out;
    }

    // Even k: composite Simpson. Odd k >= 3: Simpson up to k-3, Simpson 3/8 on the last three
    // intervals. k = 1: quadratic through f0, f1, f2 integrated over the first interval.
    Vec simpson = Vec::Zero(n);
    for (Index k = 2; k < n; k += 2) {
        simpson[k] = simpson[k - 2] + S(dt / 3) * (f[k - 2] + S(4) * f[k - 1] + f[k]);
    }
    out[1] = S(dt / 12) * (S(5) * f[0] + S(8) * f[1] - f[2]);
    for (Index k = 2; k < n; ++k) {
        if (k % 2 == 0) {
            out[k] = simpson[k];
        } else {
            out[k] = simpson[k - 3] +
                     S(3 * dt / 8) * (f[k - 3] + S(3) * f[k - 2] + S(3) * f[k - 1] + f[k]);
        }
    }
    return out;
}

// Derivative samples by central differences, second-order one-sided stencils at both ends.
template <class Vec, class Real>
Vec finite_difference(const Vec& f, Real dt) {
    using S = typename Vec::Scalar;
    const Index n = f.size();
    if (n < 3) {
        throw std::invalid_argument("finite_difference: need at least 3 samples");
    }
    Vec d(n);
    for (Index k = 1; k + 1 < n; ++k) {
        d[k] = (f[k + 1] - f[k - 1]) / S(2 * dt);
    }
    d[0] = (S(-3) * f[0] + S(4) * f[1] - f[2]) / S(2 * dt);
    d[n - 1] = (S(3) * f[n - 1] - S(4) * f[n - 2] + f[n - 3]) / S(2 * dt);
    return d;
}

}  // namespace adlab
