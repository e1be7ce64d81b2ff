#pragma once

#include <string>
#include <variant>
#include <vector>

namespace sme {

/// amplitude * exp(-decay * (scale * xi - shift)^2)
struct GaussianTerm {
    double amplitude = 0.0;
    double decay = 0.5;
    double shift = 0.0;
    double scale = 1.0;
};

struct GaussianMixture {
    std::vector<GaussianTerm> terms;
};

struct GaussianSide {
    double amplitude = 0.0;
    double decay = 0.5;
};

/// left(xi) for xi < 0, right(xi) for xi >= 0; jump at the origin.
struct PiecewiseGaussian {
    GaussianSide left;
    GaussianSide right;
};

using Distribution = std::variant<GaussianMixture, PiecewiseGaussian>;

double eval_distribution(const Distribution& d, double xi);

/// Points where the distribution is not smooth (empty for mixtures).
std::vector<double> distribution_breakpoints(const Distribution& d);

struct Moments {
    double rho = 0.0;
    double v = 0.0;
    double theta = 0.0;
};

/// rho = int f, rho v = int c f, rho theta = int (c - v)^2 f, by adaptive
/// quadrature over [-12, 12].
Moments moments(const Distribution& d);

inline constexpr double kMomentDomain = 12.0;

// Named test functions. All but the Maxwellian carry six-digit coefficients
// chosen so that their moments are (1, 0, 1).
Distribution maxwellian(double rho, double v, double theta);
Distribution f_pk();
Distribution f_b1();
Distribution f_b2();
Distribution f_wb();

/// Looks up "maxwellian", "pk", "b1", "b2" or "wb"; throws InvalidArgument otherwise.
Distribution named_distribution(const std::string& name);

}  // namespace sme
