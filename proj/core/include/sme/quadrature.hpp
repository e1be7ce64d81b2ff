#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>

namespace sme {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Standard normal density w(xi) = exp(-xi^2/2)/sqrt(2 pi), the weight of every
/// velocity-space expansion in this library.
inline double gaussian_weight(double xi) {
    return std::exp(-0.5 * xi * xi) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Analytic moment int xi^m w(xi) dxi over the real line: 0 for odd m, (m-1)!! otherwise.
double gaussian_moment(int m);

namespace quad {

inline constexpr int kGaussLegendreOrder = 20;

struct GaussLegendreRule {
    std::array<double, kGaussLegendreOrder> nodes{};
    std::array<double, kGaussLegendreOrder> weights{};
};

/// Nodes and weights on the reference interval [-1, 1].
const GaussLegendreRule& gauss_legendre_rule();

/// Fixed 20-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
    const auto& rule = gauss_legendre_rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int q = 0; q < kGaussLegendreOrder; ++q) {
        sum += rule.weights[q] * f(mid + half * rule.nodes[q]);
    }
    return half * sum;
}

/// Applies the fixed rule on every sub-interval [b_i, b_{i+1}] of a sorted breakpoint list.
template <class F>
double gauss_legendre_piecewise(F&& f, std::span<const double> breakpoints) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] > breakpoints[i]) {
            sum += gauss_legendre(f, breakpoints[i], breakpoints[i + 1]);
        }
    }
    return sum;
}

/// Adaptive Gauss-Kronrod integration of f over [a, b]. Interior breakpoints (for
/// kinks and jumps of f) split the range so each piece is integrated separately.
/// max_depth bounds the bisection depth per piece; integrands whose rounding noise
/// exceeds the tolerance otherwise refine all the way down.
double adaptive(const std::function<double(double)>& f, double a, double b,
                std::span<const double> breakpoints = {}, double tolerance = 1e-13, unsigned max_depth = 15);

}  // namespace quad
}  // namespace sme
