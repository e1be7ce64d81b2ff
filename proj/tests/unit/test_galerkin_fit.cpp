#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sme/galerkin_fit.hpp"

using namespace sme;

namespace {

std::vector<double> cuts_for(const FitResult& r, const Distribution& d) {
    std::vector<double> cuts(r.grid.knots().begin(), r.grid.knots().end());
    for (double b : distribution_breakpoints(d)) cuts.push_back(b);
    return cuts;
}

}  // namespace

TEST(Fit, MaxwellianIsRepresentedExactly) {
    for (FitVariant v : {FitVariant::unweighted, FitVariant::weighted, FitVariant::weighted_fcs}) {
        const FitResult r = fit(maxwellian(1, 0, 1), build_grid(-4, 4, 11, 2), v);
        for (double a : r.coefficients) EXPECT_LT(std::abs(a), 1e-10) << to_string(v);
        EXPECT_LT(r.l2_error, 1e-10);
        EXPECT_TRUE(r.warnings.empty());
    }
}

TEST(Fit, CoefficientCounts) {
    const KnotGrid g = build_grid(-4, 4, 9, 1);
    EXPECT_EQ(fit(f_pk(), g, FitVariant::unweighted).basis_size(), 9);
    EXPECT_EQ(fit(f_pk(), g, FitVariant::weighted).basis_size(), 9);
    EXPECT_EQ(fit(f_pk(), g, FitVariant::weighted_fcs).basis_size(), 6);
}

TEST(Fit, L2ErrorMatchesTrapezoidOracle) {
    const Distribution d = f_b1();
    const FitResult r = fit(d, build_grid(-4, 4, 17, 2), FitVariant::weighted);
    const double sq =
        oracle::trapezoid([&](double x) { return std::pow(eval_distribution(d, x) - r(x), 2); }, -12, 12, 100000);
    EXPECT_NEAR(r.l2_error, std::sqrt(sq), 1e-6);
    EXPECT_NEAR(l2_error(d, r), r.l2_error, 0.0);
}

TEST(Fit, GalerkinOrthogonality) {
    for (FitVariant v : {FitVariant::unweighted, FitVariant::weighted, FitVariant::weighted_fcs}) {
        for (const char* name : {"pk", "b2", "wb"}) {
            const Distribution d = named_distribution(name);
            const FitResult r = fit(d, build_grid(-4, 4, 12, 2), v);
            const auto cuts = cuts_for(r, d);
            for (int j = 0; j < r.basis_size(); ++j) {
                const double res = oracle::integrate(
                    [&](double x) { return (eval_distribution(d, x) - r(x)) * r.basis_function(j, x); }, -8, 8, cuts);
                EXPECT_LT(std::abs(res), 1e-9) << to_string(v) << " " << name << " j=" << j;
            }
        }
    }
}

TEST(Fit, FcsFitsConserveMoments) {
    for (const char* name : {"pk", "b1", "b2", "wb"}) {
        const Distribution d = named_distribution(name);
        for (int k = 1; k <= 3; ++k) {
            const FitResult r = fit(d, build_grid(-3, 3, 9, k), FitVariant::weighted_fcs);
            const auto cuts = cuts_for(r, d);
            for (int m = 0; m < 3; ++m) {
                const double got = oracle::integrate([&](double x) { return std::pow(x, m) * r(x); }, -12, 12, cuts);
                EXPECT_NEAR(got, gaussian_moment(m), 1e-9) << name << " k=" << k << " m=" << m;
            }
        }
    }
}

TEST(Fit, WarnsWhenTargetMomentsDiffer) {
    const FitResult r = fit(maxwellian(1.3, 0.2, 1), build_grid(-4, 4, 9, 1), FitVariant::weighted_fcs);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Fit, ErrorDecreasesUntilPlateau) {
    const std::vector<int> ns{5, 9, 17, 33};
    for (const char* name : {"pk", "b1", "b2"}) {
        for (int k = 1; k <= 3; ++k) {
            const ConvergenceTable t =
                convergence_study(named_distribution(name), FitVariant::weighted_fcs, k, {-4, 4}, ns);
            for (std::size_t i = 1; i < t.rows.size(); ++i) {
                if (t.rows[i - 1].l2_error > 10 * t.plateau_estimate) {
                    EXPECT_LE(t.rows[i].l2_error, t.rows[i - 1].l2_error * 1.0001) << name << " k=" << k << " n=" << t.rows[i].n;
                }
            }
        }
    }
}

TEST(Fit, PreplateauOrderForPeakedBimodal) {
    const std::vector<int> ns{9, 17, 33};
    const ConvergenceTable t1 = convergence_study(f_pk(), FitVariant::weighted_fcs, 1, {-4, 4}, ns);
    ASSERT_TRUE(t1.observed_order().has_value());
    EXPECT_NEAR(*t1.observed_order(), 2.0, 0.5);
    const ConvergenceTable t3 = convergence_study(f_pk(), FitVariant::weighted_fcs, 3, {-4, 4}, ns);
    ASSERT_TRUE(t3.observed_order().has_value());
    EXPECT_GE(*t3.observed_order(), 3.3);
}

TEST(Fit, UnweightedPlateau) {
    // a fixed velocity window cannot resolve the tails; the error levels off
    std::vector<double> errs;
    for (int n : {33, 65, 129}) errs.push_back(fit(f_pk(), build_grid(-2, 2, n, 1), FitVariant::unweighted).l2_error);
    EXPECT_NEAR(errs[2], errs[1], 0.1 * errs[1]);
    EXPECT_GT(errs.back(), 0.0125);
    EXPECT_LT(errs.back(), 0.05);
}

TEST(Fit, DiscontinuousTargetEvenOddDecoupling) {
    // f_WB jumps at 0: odd n puts a B-spline centre on the jump, even n a knot midpoint
    std::vector<double> errs;
    for (int n = 8; n <= 17; ++n) errs.push_back(fit(f_wb(), build_grid(-4, 4, n, 1), FitVariant::weighted_fcs).l2_error);
    EXPECT_LT(errs.back(), errs.front());
    bool non_monotone = false;
    for (std::size_t i = 1; i < errs.size(); ++i) non_monotone = non_monotone || errs[i] > errs[i - 1];
    EXPECT_TRUE(non_monotone);
}

TEST(Fit, ConvergenceStudyRejectsUnsortedList) {
    const std::vector<int> bad{9, 5};
    EXPECT_THROW(convergence_study(f_pk(), FitVariant::weighted_fcs, 1, {-4, 4}, bad), std::runtime_error);
}
