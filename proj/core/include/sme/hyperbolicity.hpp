#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "sme/sme_model.hpp"

namespace sme {

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;  // sorted by real part
    double max_imag = 0.0;
    double spectral_radius = 0.0;
    double tolerance = 0.0;  // absolute threshold actually applied
    bool hyperbolic = true;
    MomentState state;
};

inline constexpr double kDefaultHyperbolicityTol = 1e-9;

/// Eigenvalues of a dense system matrix. The state is real-hyperbolic when
/// max |Im| < rel_tol * max(1, spectral radius).
/// Throws Error(EigensolverFailure) when the QR iteration does not converge.
SpectrumReport spectrum_of(const Eigen::MatrixXd& a_sys, double rel_tol = kDefaultHyperbolicityTol);

SpectrumReport spectrum(const ProjectionMatrices& p, const MomentState& s,
                        double rel_tol = kDefaultHyperbolicityTol, bool linearized = false);

struct ScanAxis {
    double lo = -3.0;
    double hi = 3.0;
    int resolution = 201;

    double value(int idx) const {
        return resolution == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx / (resolution - 1);
    }
};

struct BoundingBox {
    double lo_i = 0.0, hi_i = 0.0, lo_j = 0.0, hi_j = 0.0;
    bool empty = true;
};

/// Hyperbolicity over a plane of two spline coefficients, all others fixed.
/// Points where B is singular count as not hyperbolic with max_imag = inf.
struct DomainScan {
    int i = 0;
    int j = 1;
    ScanAxis axis_i;
    ScanAxis axis_j;
    MomentState base;
    bool linearized = false;
    std::vector<std::uint8_t> hyperbolic;  // row-major, index a * axis_j.resolution + b
    std::vector<double> max_imag;

    bool at(int a, int b) const { return hyperbolic[static_cast<std::size_t>(a) * axis_j.resolution + b] != 0; }
    double area_fraction() const;
    BoundingBox bounding_box() const;
};

/// The two middle spline coefficients (0-based) for m = n - 3 coefficients.
std::pair<int, int> center_indices(int m);

DomainScan scan_domain(const ProjectionMatrices& p, const MomentState& base, int i, int j,
                       ScanAxis axis_i = {}, ScanAxis axis_j = {}, bool linearized = false,
                       double rel_tol = kDefaultHyperbolicityTol);

/// Walks s = step, 2 step, ... up to s_max along base + s * direction and returns
/// the first s at which the spectrum is no longer real (nullopt if none).
std::optional<double> first_loss_along_ray(const ProjectionMatrices& p, const MomentState& base,
                                           const std::vector<double>& direction, double s_max, double step);

/// CSV with header kappa_i,kappa_j,hyperbolic,max_imag.
void write_scan_csv(const DomainScan& scan, std::ostream& os);

}  // namespace sme
