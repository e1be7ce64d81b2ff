#include "sme/distributions.hpp"

#include <cmath>
#include <numbers>

#include "sme/error.hpp"
#include "sme/quadrature.hpp"

namespace sme {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double eval_mixture(const GaussianMixture& g, double xi) {
    double sum = 0.0;
    for (const auto& t : g.terms) {
        const double s = t.scale * xi - t.shift;
        sum += t.amplitude * std::exp(-t.decay * s * s);
    }
    return sum;
}

double eval_piecewise(const PiecewiseGaussian& g, double xi) {
    const GaussianSide& side = xi < 0.0 ? g.left : g.right;
    return side.amplitude * std::exp(-side.decay * xi * xi);
}

}  // namespace

double eval_distribution(const Distribution& d, double xi) {
    return std::visit(overloaded{[xi](const GaussianMixture& g) { return eval_mixture(g, xi); },
                                 [xi](const PiecewiseGaussian& g) { return eval_piecewise(g, xi); }},
                      d);
}

std::vector<double> distribution_breakpoints(const Distribution& d) {
    if (std::holds_alternative<PiecewiseGaussian>(d)) return {0.0};
    return {};
}

Moments moments(const Distribution& d) {
    const auto cuts = distribution_breakpoints(d);
    const double a = -kMomentDomain;
    const double b = kMomentDomain;
    const double rho = quad::adaptive([&](double c) { return eval_distribution(d, c); }, a, b, cuts);
    const double mom1 = quad::adaptive([&](double c) { return c * eval_distribution(d, c); }, a, b, cuts);
    const double v = mom1 / rho;
    const double energy =
        quad::adaptive([&](double c) { return (c - v) * (c - v) * eval_distribution(d, c); }, a, b, cuts);
    return {rho, v, energy / rho};
}

Distribution maxwellian(double rho, double v, double theta) {
    if (!(rho > 0.0) || !(theta > 0.0)) {
        fail(ErrorKind::InvalidArgument, "maxwellian: rho and theta must be positive");
    }
    const double amplitude = rho / std::sqrt(2.0 * std::numbers::pi * theta);
    return GaussianMixture{{GaussianTerm{amplitude, 0.5 / theta, v, 1.0}}};
}

Distribution f_pk() {
    return GaussianMixture{{{0.16241, 0.45116, 0.8, 1.0}, {0.812051, 6.34444, -0.6, 1.0}}};
}

Distribution f_b1() {
    return GaussianMixture{{{0.527399, 5.55556, 0.3, 0.566569}, {0.169521, 3.125, -0.7, 0.566569}}};
}

Distribution f_b2() {
    return GaussianMixture{{{0.274485, 3.125, 0.525, 1.10085}, {0.274485, 0.347222, -0.175, 1.10085}}};
}

Distribution f_wb() { return PiecewiseGaussian{{0.824423, 1.11803}, {0.164885, 0.223607}}; }

Distribution named_distribution(const std::string& name) {
    if (name == "maxwellian") return maxwellian(1.0, 0.0, 1.0);
    if (name == "pk") return f_pk();
    if (name == "b1") return f_b1();
    if (name == "b2") return f_b2();
    if (name == "wb") return f_wb();
    fail(ErrorKind::InvalidArgument, "unknown distribution '" + name + "' (expected maxwellian, pk, b1, b2, wb)");
}

}  // namespace sme
