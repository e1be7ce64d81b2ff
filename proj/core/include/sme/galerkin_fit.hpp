#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sme/distributions.hpp"
#include "sme/spline_basis.hpp"

namespace sme {

enum class FitVariant { unweighted, weighted, weighted_fcs };

std::string_view to_string(FitVariant v);
FitVariant parse_fit_variant(std::string_view s);

/// Galerkin approximation of a distribution in one of three spline expansions:
///   unweighted:   f^ = w + sum a_i B_i
///   weighted:     f^ = w (1 + sum a_i B_i)
///   weighted_fcs: f^ = w (1 + sum a_i F_i)
struct FitResult {
    FitVariant variant = FitVariant::weighted_fcs;
    KnotGrid grid;
    std::optional<ConstrainedSplineBasis> basis;  // set for weighted_fcs
    std::vector<double> coefficients;
    double l2_error = 0.0;
    double condition_estimate = 1.0;
    std::vector<std::string> warnings;

    int basis_size() const { return static_cast<int>(coefficients.size()); }
    double basis_function(int i, double xi) const;
    double operator()(double xi) const;
};

/// Solves A a = u with A_ij = <phi_j, psi_i>, u_i = <f - w, psi_i>, where phi are the
/// (weighted) trial functions and the test functions psi are the unweighted basis
/// functions of the variant. Warns when the condition estimate exceeds 1e12 and
/// throws Error(SingularSystem) when elimination breaks down.
FitResult fit(const Distribution& d, const KnotGrid& grid, FitVariant variant);

/// ||f - f^||_{L2} over [-12, 12] by adaptive quadrature.
double l2_error(const Distribution& d, const FitResult& fit);

struct ConvergenceRow {
    int n = 0;
    double delta_xi = 0.0;
    double l2_error = 0.0;
    std::optional<double> order;  // against the previous row, pre-plateau only
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double plateau_estimate = 0.0;

    /// Largest empirical order among pre-plateau row pairs, if any.
    std::optional<double> observed_order() const;
};

/// Truncation floor: ||f - w|| outside the span of the basis. Any expansion reduces
/// to w there, so no fit on this grid can go below it.
double truncation_error(const Distribution& d, const KnotGrid& grid);

/// Fits for each n in n_list (increasing) and reports errors and empirical orders
/// log(e_{i-1}/e_i) / log(dxi_{i-1}/dxi_i). Orders are only computed where both
/// errors exceed ten times the plateau estimate; when none is given, the
/// truncation error of the finest grid is used.
ConvergenceTable convergence_study(const Distribution& d, FitVariant variant, int k, Interval range,
                                   std::span<const int> n_list, std::optional<double> plateau = std::nullopt);

}  // namespace sme
