#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "sme/quadrature.hpp"

namespace sme {

/// Equidistant velocity-space grid carrying n B-splines of order k.
///
/// The knot vector is extended by (k+1)/2 spacings beyond [xi_min, xi_max] on
/// each side, so the centers of the first and last B-spline sit exactly on
/// xi_min and xi_max. There are n + k + 1 knots.
class KnotGrid {
public:
    KnotGrid() = default;
    KnotGrid(double xi_min, double xi_max, int n, int k);

    double xi_min() const { return xi_min_; }
    double xi_max() const { return xi_max_; }
    int n() const { return n_; }
    int k() const { return k_; }
    double delta_xi() const { return delta_; }

    std::span<const double> knots() const { return knots_; }

    /// Knot position for any integer index; indices outside the stored range
    /// are extrapolated on the same uniform spacing.
    double knot(int i) const { return knots_.front() + i * delta_; }

    /// Support [knot_j, knot_{j+order+1}] of the j-th B-spline of the given order.
    Interval support(int j, int order) const { return {knot(j), knot(j + order + 1)}; }
    Interval support(int j) const { return support(j, k_); }

    /// Region where k+1 B-splines overlap and sum to one.
    Interval unity_interval() const { return {knot(k_), knot(n_)}; }

    /// Whole span covered by the basis, [first knot, last knot].
    Interval span() const { return {knots_.front(), knots_.back()}; }

    bool operator==(const KnotGrid&) const = default;

private:
    double xi_min_ = 0.0;
    double xi_max_ = 0.0;
    int n_ = 0;
    int k_ = 0;
    double delta_ = 0.0;
    std::vector<double> knots_;
};

/// Throws Error(InvalidArgument) unless xi_min < xi_max, n >= 4 and k in {1,2,3}.
KnotGrid build_grid(double xi_min, double xi_max, int n, int k);

struct BSpline {
    const KnotGrid* grid = nullptr;
    int index = 0;
    int order = 1;
};

/// B_{j,k}(xi) via the order-raising recursion grounded in the hat function.
/// Returns exactly 0 outside the support. Order 0 is the half-open indicator of
/// [knot_j, knot_{j+1}) and is only used for derivatives of order-1 splines.
double eval_bspline(const KnotGrid& grid, int j, int order, double xi);
double eval_bspline(const BSpline& b, double xi);

/// d/dxi B_{j,k}(xi) = (B_{j,k-1}(xi) - B_{j+1,k-1}(xi)) / delta_xi on a uniform grid.
double eval_bspline_derivative(const KnotGrid& grid, int j, int order, double xi);

/// Fundamental constrained splines: F_j = sum_{l<4} a_l B_{j+l,k}, with the
/// coefficients chosen so that int w F_j xi^m dxi = 0 for m = 0, 1, 2 and
/// normalised to unit Euclidean norm. Built from consecutive start indices
/// 0..n-4, giving n-3 functions.
class ConstrainedSplineBasis {
public:
    ConstrainedSplineBasis() = default;
    ConstrainedSplineBasis(KnotGrid grid, std::vector<std::array<double, 4>> coeffs);

    const KnotGrid& grid() const { return grid_; }
    int count() const { return static_cast<int>(coeffs_.size()); }
    const std::array<double, 4>& coefficients(int i) const { return coeffs_[i]; }
    std::span<const std::array<double, 4>> all_coefficients() const { return coeffs_; }

    double eval(int i, double xi) const;
    double derivative(int i, double xi) const;
    Interval support(int i) const;

private:
    KnotGrid grid_;
    std::vector<std::array<double, 4>> coeffs_;
};

/// Solves the 3x3 moment system for each start index and normalises.
/// Throws Error(SingularSystem) when the 1-norm condition estimate exceeds 1e12.
ConstrainedSplineBasis build_fcs(const KnotGrid& grid);

/// Constraint residuals int w F_i xi^m dxi, m = 0,1,2, for every FCS.
std::vector<std::array<double, 3>> fcs_constraint_residuals(const ConstrainedSplineBasis& basis);

/// int_{support} xi^m w(xi) f(xi) dxi by 20-point Gauss-Legendre on every knot
/// sub-interval of the grid that intersects the support. Extra breakpoints
/// (discontinuities of f) further split those sub-intervals.
double weighted_moment(const KnotGrid& grid, const std::function<double(double)>& f, int m,
                       Interval support, std::span<const double> extra_breakpoints = {});

/// Breakpoints for piecewise quadrature: grid knots clipped to [lo, hi], plus
/// lo, hi and any extra points inside, sorted and de-duplicated.
std::vector<double> quadrature_breakpoints(const KnotGrid& grid, Interval range,
                                           std::span<const double> extra = {});

}  // namespace sme
