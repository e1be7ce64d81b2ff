#pragma once

// Reference computations that do not share code paths with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// Adaptive 61-point Gauss-Kronrod over [a, b], split at the given points.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts = {}) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]);
        const double hi = std::min(b, cuts[i + 1]);
        if (hi > lo) sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 8, 1e-14);
    }
    return sum;
}

/// Composite trapezoid rule with m intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int m) {
    const double h = (b - a) / m;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < m; ++i) sum += f(a + i * h);
    return sum * h;
}

/// Centered cardinal B-splines of order k (degree k) for unit spacing, written out
/// piecewise; support is [-(k+1)/2, (k+1)/2].
inline double cardinal_bspline(int k, double x) {
    const double a = std::abs(x);
    switch (k) {
        case 1: return a < 1.0 ? 1.0 - a : 0.0;
        case 2:
            if (a <= 0.5) return 0.75 - a * a;
            if (a < 1.5) return 0.5 * (1.5 - a) * (1.5 - a);
            return 0.0;
        case 3:
            if (a <= 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
            if (a < 2.0) return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
            return 0.0;
        default: return NAN;
    }
}

}  // namespace oracle
