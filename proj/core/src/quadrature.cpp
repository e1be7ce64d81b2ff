#include "sme/quadrature.hpp"

#include <algorithm>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sme {

double gaussian_moment(int m) {
    if (m < 0 || m % 2 == 1) return 0.0;
    double value = 1.0;
    for (int j = m - 1; j > 1; j -= 2) value *= j;
    return value;
}

namespace quad {

const GaussLegendreRule& gauss_legendre_rule() {
    static const GaussLegendreRule rule = [] {
        using Rule = boost::math::quadrature::gauss<double, kGaussLegendreOrder>;
        const auto& abscissa = Rule::abscissa();
        const auto& weights = Rule::weights();
        GaussLegendreRule r;
        // Boost stores the non-negative half of the symmetric rule.
        const int half = kGaussLegendreOrder / 2;
        for (int i = 0; i < half; ++i) {
            r.nodes[half - 1 - i] = -abscissa[i];
            r.weights[half - 1 - i] = weights[i];
            r.nodes[half + i] = abscissa[i];
            r.weights[half + i] = weights[i];
        }
        return r;
    }();
    return rule;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                std::span<const double> breakpoints, double tolerance, unsigned max_depth) {
    std::vector<double> cuts{a};
    for (double x : breakpoints) {
        if (x > a && x < b) cuts.push_back(x);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        sum += Kronrod::integrate(f, cuts[i], cuts[i + 1], max_depth, tolerance);
    }
    return sum;
}

}  // namespace quad
}  // namespace sme
