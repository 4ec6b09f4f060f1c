#pragma once

// Test-only oracles, independent of the library's certified code paths:
// dense-grid suprema, central finite differences, and brute-force sums.

#include <algorithm>
#include <cmath>
#include <complex>

#include "spikesolve/family.hpp"

namespace oracles {

/// Dense-grid sup of |P| using direct per-point evaluation (not the
/// library's scan-grid path).
inline double dense_sup(const spikesolve::GeneralizedPolynomial& p,
                        int points) {
    const spikesolve::Domain dom = p.family().domain();
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = dom.is_circle()
                             ? double(i) / double(points)
                             : -1.0 + 2.0 * double(i) / double(points - 1);
        best = std::max(best, std::abs(p.eval(x)));
    }
    return best;
}

/// Central finite difference of P at x.
inline std::complex<double> fd1(const spikesolve::GeneralizedPolynomial& p,
                                double x, double h = 1e-6) {
    return (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
}

inline std::complex<double> fd2(const spikesolve::GeneralizedPolynomial& p,
                                double x, double h = 1e-5) {
    return (p.eval(x + h) - 2.0 * p.eval(x) + p.eval(x - h)) / (h * h);
}

}  // namespace oracles
