#include "sme/spline_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "sme/error.hpp"

namespace sme {

KnotGrid::KnotGrid(double xi_min, double xi_max, int n, int k)
    : xi_min_(xi_min), xi_max_(xi_max), n_(n), k_(k), delta_((xi_max - xi_min) / (n - 1)) {
    const double first = xi_min - 0.5 * delta_ * (k + 1);
    knots_.resize(static_cast<std::size_t>(n + k + 1));
    for (int i = 0; i < n + k + 1; ++i) knots_[i] = first + i * delta_;
}

KnotGrid build_grid(double xi_min, double xi_max, int n, int k) {
    if (!(xi_min < xi_max) || !std::isfinite(xi_min) || !std::isfinite(xi_max)) {
        fail(ErrorKind::InvalidArgument, "build_grid: need finite xi_min < xi_max");
    }
    if (n < 4) {
        fail(ErrorKind::InvalidArgument,
             "build_grid: n = " + std::to_string(n) + " < 4; one constrained spline needs four B-splines");
    }
    if (k < 1 || k > 3) {
        fail(ErrorKind::InvalidArgument, "build_grid: spline order k = " + std::to_string(k) +
                                             " outside {1, 2, 3}");
    }
    return KnotGrid(xi_min, xi_max, n, k);
}

double eval_bspline(const KnotGrid& grid, int j, int order, double xi) {
    const double lo = grid.knot(j);
    const double hi = grid.knot(j + order + 1);
    if (xi < lo || xi > hi) return 0.0;
    const double d = grid.delta_xi();
    if (order == 0) return xi < hi ? 1.0 : 0.0;
    if (order == 1) {
        const double mid = grid.knot(j + 1);
        return xi <= mid ? (xi - lo) / d : (hi - xi) / d;
    }
    const double left = (xi - lo) / (order * d);
    const double right = (hi - xi) / (order * d);
    return left * eval_bspline(grid, j, order - 1, xi) + right * eval_bspline(grid, j + 1, order - 1, xi);
}

double eval_bspline(const BSpline& b, double xi) { return eval_bspline(*b.grid, b.index, b.order, xi); }

double eval_bspline_derivative(const KnotGrid& grid, int j, int order, double xi) {
    if (order < 1) return 0.0;
    return (eval_bspline(grid, j, order - 1, xi) - eval_bspline(grid, j + 1, order - 1, xi)) /
           grid.delta_xi();
}

ConstrainedSplineBasis::ConstrainedSplineBasis(KnotGrid grid, std::vector<std::array<double, 4>> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {}

double ConstrainedSplineBasis::eval(int i, double xi) const {
    const Interval s = support(i);
    if (xi < s.lo || xi > s.hi) return 0.0;
    const auto& a = coeffs_[i];
    double sum = 0.0;
    for (int l = 0; l < 4; ++l) sum += a[l] * eval_bspline(grid_, i + l, grid_.k(), xi);
    return sum;
}

double ConstrainedSplineBasis::derivative(int i, double xi) const {
    const Interval s = support(i);
    if (xi < s.lo || xi > s.hi) return 0.0;
    const auto& a = coeffs_[i];
    double sum = 0.0;
    for (int l = 0; l < 4; ++l) sum += a[l] * eval_bspline_derivative(grid_, i + l, grid_.k(), xi);
    return sum;
}

Interval ConstrainedSplineBasis::support(int i) const {
    return {grid_.knot(i), grid_.knot(i + 3 + grid_.k() + 1)};
}

std::vector<double> quadrature_breakpoints(const KnotGrid& grid, Interval range, std::span<const double> extra) {
    std::vector<double> pts{range.lo, range.hi};
    for (double t : grid.knots()) {
        if (t > range.lo && t < range.hi) pts.push_back(t);
    }
    for (double t : extra) {
        if (t > range.lo && t < range.hi) pts.push_back(t);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double weighted_moment(const KnotGrid& grid, const std::function<double(double)>& f, int m, Interval support,
                       std::span<const double> extra_breakpoints) {
    const auto pts = quadrature_breakpoints(grid, support, extra_breakpoints);
    return quad::gauss_legendre_piecewise(
        [&](double xi) { return std::pow(xi, m) * gaussian_weight(xi) * f(xi); }, pts);
}

ConstrainedSplineBasis build_fcs(const KnotGrid& grid) {
    const int n = grid.n();
    const int k = grid.k();

    // moments[j][m] = int xi^m w B_{j,k}
    std::vector<std::array<double, 3>> moments(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto bj = [&](double xi) { return eval_bspline(grid, j, k, xi); };
        for (int m = 0; m < 3; ++m) moments[j][m] = weighted_moment(grid, bj, m, grid.support(j));
    }

    std::vector<std::array<double, 4>> coeffs;
    coeffs.reserve(static_cast<std::size_t>(n - 3));
    for (int alpha = 0; alpha + 3 < n; ++alpha) {
        Eigen::Matrix3d system;
        Eigen::Vector3d rhs;
        for (int m = 0; m < 3; ++m) {
            for (int l = 0; l < 3; ++l) system(m, l) = moments[alpha + l][m];
            rhs(m) = -moments[alpha + 3][m];
        }
        const double det = system.determinant();
        const double norm1 = system.cwiseAbs().colwise().sum().maxCoeff();
        double cond = std::numeric_limits<double>::infinity();
        if (det != 0.0 && std::isfinite(det)) {
            cond = norm1 * system.inverse().cwiseAbs().colwise().sum().maxCoeff();
        }
        if (!(cond <= 1e12)) {
            std::ostringstream msg;
            msg << "build_fcs: constraint system for start index " << alpha
                << " is singular (condition estimate " << cond << ")";
            fail(ErrorKind::SingularSystem, msg.str());
        }
        const Eigen::Vector3d a = system.partialPivLu().solve(rhs);
        const double norm = std::sqrt(a.squaredNorm() + 1.0);
        coeffs.push_back({a(0) / norm, a(1) / norm, a(2) / norm, 1.0 / norm});
    }
    return ConstrainedSplineBasis(grid, std::move(coeffs));
}

std::vector<std::array<double, 3>> fcs_constraint_residuals(const ConstrainedSplineBasis& basis) {
    std::vector<std::array<double, 3>> out(static_cast<std::size_t>(basis.count()));
    for (int i = 0; i < basis.count(); ++i) {
        const auto fi = [&](double xi) { return basis.eval(i, xi); };
        for (int m = 0; m < 3; ++m) out[i][m] = weighted_moment(basis.grid(), fi, m, basis.support(i));
    }
    return out;
}

}  // namespace sme
