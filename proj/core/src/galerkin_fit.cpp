#include "sme/galerkin_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "sme/error.hpp"

namespace sme {

std::string_view to_string(FitVariant v) {
    switch (v) {
        case FitVariant::unweighted: return "unweighted";
        case FitVariant::weighted: return "weighted";
        case FitVariant::weighted_fcs: return "weighted_fcs";
    }
    return "unknown";
}

FitVariant parse_fit_variant(std::string_view s) {
    if (s == "unweighted") return FitVariant::unweighted;
    if (s == "weighted") return FitVariant::weighted;
    if (s == "weighted_fcs" || s == "fcs") return FitVariant::weighted_fcs;
    fail(ErrorKind::InvalidArgument, "unknown fit variant '" + std::string(s) + "'");
}

double FitResult::basis_function(int i, double xi) const {
    if (variant == FitVariant::weighted_fcs) return basis->eval(i, xi);
    return eval_bspline(grid, i, grid.k(), xi);
}

double FitResult::operator()(double xi) const {
    double sum = 0.0;
    for (int i = 0; i < basis_size(); ++i) {
        if (coefficients[i] != 0.0) sum += coefficients[i] * basis_function(i, xi);
    }
    const double w = gaussian_weight(xi);
    return variant == FitVariant::unweighted ? w + sum : w * (1.0 + sum);
}

FitResult fit(const Distribution& d, const KnotGrid& grid, FitVariant variant) {
    FitResult result;
    result.variant = variant;
    result.grid = grid;
    if (variant == FitVariant::weighted_fcs) {
        result.basis = build_fcs(grid);
        const Moments mom = moments(d);
        if (std::abs(mom.rho - 1.0) > 1e-3 || std::abs(mom.v) > 1e-3 || std::abs(mom.theta - 1.0) > 1e-3) {
            std::ostringstream msg;
            msg << "target moments (" << mom.rho << ", " << mom.v << ", " << mom.theta
                << ") differ from (1, 0, 1); constrained expansion cannot match them";
            result.warnings.push_back(msg.str());
        }
    }
    const int size = variant == FitVariant::weighted_fcs ? grid.n() - 3 : grid.n();
    result.coefficients.assign(static_cast<std::size_t>(size), 0.0);

    const auto cuts = distribution_breakpoints(d);
    const auto pts = quadrature_breakpoints(grid, grid.span(), cuts);
    const bool weighted_trial = variant != FitVariant::unweighted;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd values(size);
    const auto& rule = quad::gauss_legendre_rule();
    for (std::size_t c = 0; c + 1 < pts.size(); ++c) {
        const double half = 0.5 * (pts[c + 1] - pts[c]);
        const double mid = 0.5 * (pts[c + 1] + pts[c]);
        for (int q = 0; q < quad::kGaussLegendreOrder; ++q) {
            const double xi = mid + half * rule.nodes[q];
            const double wq = half * rule.weights[q];
            int first = size;
            int last = -1;
            for (int i = 0; i < size; ++i) {
                values(i) = result.basis_function(i, xi);
                if (values(i) != 0.0) {
                    first = std::min(first, i);
                    last = std::max(last, i);
                }
            }
            if (last < 0) continue;
            const double w = gaussian_weight(xi);
            const double trial_scale = weighted_trial ? w : 1.0;
            const double residual = eval_distribution(d, xi) - w;
            for (int i = first; i <= last; ++i) {
                u(i) += wq * residual * values(i);
                for (int j = first; j <= last; ++j) A(i, j) += wq * trial_scale * values(j) * values(i);
            }
        }
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rcond = lu.rcond();
    result.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    const Eigen::VectorXd a = lu.solve(u);
    if (rcond == 0.0 || !a.allFinite()) {
        fail(ErrorKind::SingularSystem, "fit: Galerkin system is singular");
    }
    if (result.condition_estimate > 1e12) {
        std::ostringstream msg;
        msg << "Galerkin system is ill-conditioned (condition estimate " << result.condition_estimate << ")";
        result.warnings.push_back(msg.str());
    }
    for (int i = 0; i < size; ++i) result.coefficients[i] = a(i);
    result.l2_error = l2_error(d, result);
    return result;
}

double l2_error(const Distribution& d, const FitResult& fit) {
    std::vector<double> cuts = distribution_breakpoints(d);
    for (double t : fit.grid.knots()) cuts.push_back(t);
    const double sq = quad::adaptive(
        [&](double xi) {
            const double r = eval_distribution(d, xi) - fit(xi);
            return r * r;
        },
        -kMomentDomain, kMomentDomain, cuts, 1e-12, 6);
    return std::sqrt(std::max(sq, 0.0));
}

double truncation_error(const Distribution& d, const KnotGrid& grid) {
    const Interval span = grid.span();
    const auto sq = [&](double xi) {
        const double r = eval_distribution(d, xi) - gaussian_weight(xi);
        return r * r;
    };
    const auto cuts = distribution_breakpoints(d);
    double total = 0.0;
    if (span.lo > -kMomentDomain) total += quad::adaptive(sq, -kMomentDomain, span.lo, cuts);
    if (span.hi < kMomentDomain) total += quad::adaptive(sq, span.hi, kMomentDomain, cuts);
    return std::sqrt(total);
}

std::optional<double> ConvergenceTable::observed_order() const {
    std::optional<double> best;
    for (const auto& row : rows) {
        if (row.order && (!best || *row.order > *best)) best = row.order;
    }
    return best;
}

ConvergenceTable convergence_study(const Distribution& d, FitVariant variant, int k, Interval range,
                                   std::span<const int> n_list, std::optional<double> plateau) {
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
        fail(ErrorKind::InvalidArgument, "convergence_study: n_list must be strictly increasing");
    }
    ConvergenceTable table;
    for (int n : n_list) {
        const KnotGrid grid = build_grid(range.lo, range.hi, n, k);
        const FitResult r = fit(d, grid, variant);
        table.rows.push_back({n, grid.delta_xi(), r.l2_error, std::nullopt});
    }
    if (table.rows.empty()) return table;
    table.plateau_estimate =
        plateau ? *plateau : truncation_error(d, build_grid(range.lo, range.hi, n_list.back(), k));
    const double floor = 10.0 * table.plateau_estimate;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto& prev = table.rows[i - 1];
        auto& cur = table.rows[i];
        if (prev.l2_error > floor && cur.l2_error > floor) {
            cur.order = std::log(prev.l2_error / cur.l2_error) / std::log(prev.delta_xi / cur.delta_xi);
        }
    }
    return table;
}

}  // namespace sme
