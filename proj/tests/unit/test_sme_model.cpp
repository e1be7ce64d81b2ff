#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sme/error.hpp"
#include "sme/galerkin_fit.hpp"
#include "sme/sme_model.hpp"

using namespace sme;

namespace {

std::shared_ptr<const ProjectionMatrices> projection(int n, int k = 1, double lo = -4, double hi = 4) {
    return std::make_shared<const ProjectionMatrices>(assemble_projection(build_fcs(build_grid(lo, hi, n, k))));
}

MomentState random_state(std::mt19937& rng, int m, double kappa_scale) {
    std::uniform_real_distribution<double> r(0.2, 5.0), v(-3.0, 3.0), t(0.3, 4.0), k(-kappa_scale, kappa_scale);
    MomentState s{r(rng), v(rng), t(rng), {}};
    for (int i = 0; i < m; ++i) s.kappa.push_back(k(rng));
    return s;
}

}  // namespace

TEST(Projection, MonomialRowsAndVectors) {
    const auto p = projection(10);
    EXPECT_EQ(p->n(), 10);
    EXPECT_EQ(p->count(), 7);
    EXPECT_DOUBLE_EQ(p->V(0), 1.0);
    EXPECT_DOUBLE_EQ(p->V(1), 0.0);
    EXPECT_DOUBLE_EQ(p->V(2), 1.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < p->count(); ++j) {
            EXPECT_LT(std::abs(p->M(i, j)), 1e-12);
            EXPECT_LT(std::abs(p->M_dxi(i, j)), 1e-12);
            EXPECT_LT(std::abs(p->M_xidxi(i, j)), 1e-12);
        }
    }
    // FCS rows of V, V_xi, V_dxi, V_xidxi vanish by the constraints
    for (int i = 3; i < p->n(); ++i) {
        EXPECT_LT(std::abs(p->V(i)), 1e-12);
        EXPECT_LT(std::abs(p->V_xi(i)), 1e-12);
        EXPECT_LT(std::abs(p->V_xidxi(i)), 1e-12);
    }
}

TEST(Projection, EntriesMatchQuadratureOracle) {
    const auto p = projection(9, 2);
    const ConstrainedSplineBasis& b = p->basis;
    std::vector<double> cuts(b.grid().knots().begin(), b.grid().knots().end());
    const auto psi = [&](int i, double x) { return i < 3 ? std::pow(x, i) : b.eval(i - 3, x); };
    const auto wphi = [&](int j, double x) { return oracle::normal_pdf(x) * b.eval(j, x); };
    const auto dwphi = [&](int j, double x) {
        const double h = 1e-5;
        return (wphi(j, x + h) - wphi(j, x - h)) / (2 * h);
    };
    for (int i = 0; i < p->n(); ++i) {
        for (int j = 0; j < p->count(); ++j) {
            const Interval s = b.support(j);
            const auto I = [&](auto f) { return oracle::integrate(f, s.lo, s.hi, cuts); };
            EXPECT_NEAR(p->M(i, j), I([&](double x) { return psi(i, x) * wphi(j, x); }), 1e-10);
            EXPECT_NEAR(p->M_xi(i, j), I([&](double x) { return psi(i, x) * x * wphi(j, x); }), 1e-10);
            EXPECT_NEAR(p->M_dxi(i, j), I([&](double x) { return psi(i, x) * dwphi(j, x); }), 1e-8);
            EXPECT_NEAR(p->M_xidxi(i, j), I([&](double x) { return psi(i, x) * x * dwphi(j, x); }), 1e-8);
            EXPECT_NEAR(p->M_xixidxi(i, j), I([&](double x) { return psi(i, x) * x * x * dwphi(j, x); }), 1e-8);
        }
    }
    for (int j = 0; j < p->count(); ++j) {
        const Interval s = b.support(j);
        EXPECT_NEAR(p->heat_flux(j),
                    oracle::integrate([&](double x) { return x * x * x * wphi(j, x); }, s.lo, s.hi, cuts), 1e-12);
    }
}

TEST(Projection, PublishedHeatFluxCoefficients) {
    const auto p10 = projection(10);
    const double ref10[] = {0.000847777, 0.0129408, 0.0836094, 0.170286, 0.0836094, 0.0129408, 0.000847777};
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(p10->heat_flux(i), ref10[i], 1e-5);
    const auto p7 = projection(7);
    const double ref7[] = {0.00699159, 0.179474, 0.179474, 0.00699159};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(p7->heat_flux(i), ref7[i], 1e-5);
}

TEST(System, BlockIdentity) {
    std::mt19937 rng(3);
    for (int n : {5, 7, 10, 13}) {
        const auto p = projection(n);
        const int m = n - 3;
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(n, m);
        expected.bottomRows(m).setIdentity();
        for (int s = 0; s < 100; ++s) {
            const SystemMatrices sys = assemble_system(*p, random_state(rng, m, 0.3));
            const Eigen::MatrixXd bm = sys.B.partialPivLu().solve(p->M);
            EXPECT_LT((bm - expected).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
        }
    }
}

TEST(System, EulerRowsAtEquilibrium) {
    std::mt19937 rng(5);
    for (int n : {4, 7, 13}) {
        const auto p = projection(n);
        for (int s = 0; s < 50; ++s) {
            MomentState st = random_state(rng, n - 3, 0.0);
            const Eigen::MatrixXd a = assemble_system(*p, st).A_sys;
            const double r = st.rho, v = st.v, t = st.theta;
            Eigen::MatrixXd euler = Eigen::MatrixXd::Zero(3, n);
            euler.row(0).head(3) << v, r, 0;
            euler.row(1).head(3) << t / r, v, 1;
            euler.row(2).head(3) << 0, 2 * t, v;
            euler.row(2).tail(n - 3) = t * std::sqrt(t) * p->heat_flux.transpose();
            EXPECT_LT((a.topRows(3) - euler).cwiseAbs().maxCoeff(), 1e-9) << "n=" << n;
        }
    }
}

TEST(System, ConservationStructureAtRandomKappa) {
    // rows 0-2 are rho, v, theta forms of mass, momentum and energy conservation
    std::mt19937 rng(9);
    const auto p = projection(10);
    std::normal_distribution<double> g;
    for (int s = 0; s < 50; ++s) {
        const MomentState st = random_state(rng, 7, 0.4);
        const Eigen::MatrixXd a = assemble_system(*p, st).A_sys;
        Eigen::VectorXd du(10);
        for (int i = 0; i < 10; ++i) du(i) = g(rng);
        const Eigen::VectorXd r = a * du;
        const double rho = st.rho, v = st.v, t = st.theta, sq = std::sqrt(t);
        double qb = 0.0, dqb = 0.0;
        for (int i = 0; i < 7; ++i) {
            qb += p->heat_flux(i) * st.kappa[i];
            dqb += p->heat_flux(i) * du(3 + i);
        }
        const double dm = v * du(0) + rho * du(1);                                  // d(rho v)
        const double mom = (t * du(0) + rho * v * du(1) + rho * du(2)) / rho;       // (dE - v dm)/rho
        const double d_f2 = (v * v * v + 3 * v * t) * du(0) + (3 * rho * v * v + 3 * rho * t) * du(1) +
                            3 * rho * v * du(2) + t * sq * qb * du(0) + 1.5 * rho * sq * qb * du(2) +
                            rho * t * sq * dqb;
        const double energy = (d_f2 - (v * v + t) * dm - 2 * rho * v * mom) / rho;
        EXPECT_NEAR(r(0), dm, 1e-8 * (1 + std::abs(dm)));
        EXPECT_NEAR(r(1), mom, 1e-8 * (1 + std::abs(mom)));
        EXPECT_NEAR(r(2), energy, 1e-8 * (1 + std::abs(energy)));
    }
}

TEST(System, EigenvaluesIndependentOfDensity) {
    const auto p = projection(9);
    MomentState s{1.0, 0.3, 1.7, {0.1, -0.2, 0.05, 0.3, -0.1, 0.2}};
    std::vector<std::complex<double>> ref;
    for (double rho : {0.5, 1.0, 7.0}) {
        s.rho = rho;
        Eigen::EigenSolver<Eigen::MatrixXd> es(assemble_system(*p, s).A_sys);
        std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + 9);
        std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });
        if (ref.empty()) ref = ev;
        for (int i = 0; i < 9; ++i) EXPECT_NEAR(std::abs(ev[i] - ref[i]), 0.0, 1e-9);
    }
}

TEST(System, LinearizedEqualsFullAtEquilibrium) {
    const auto p = projection(8);
    MomentState s = MomentState::equilibrium(2.0, -0.4, 1.3, 5);
    EXPECT_LT((linearized_system(*p, s).A_sys - assemble_system(*p, s).A_sys).cwiseAbs().maxCoeff(), 1e-14);
    s.kappa = {0.2, -0.1, 0.3, 0.0, 0.1};
    MomentState s0 = s;
    s0.kappa.assign(5, 0.0);
    EXPECT_LT((linearized_system(*p, s).A_sys - assemble_system(*p, s0).A_sys).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(System, StructuredOperatorMatchesDense) {
    std::mt19937 rng(17);
    for (int n : {4, 7, 13}) {
        const auto p = projection(n, 2);
        const QuasiLinearOperator full(p), lin(p, true);
        for (int s = 0; s < 20; ++s) {
            const MomentState st = random_state(rng, n - 3, 0.3);
            const Eigen::VectorXd u = st.to_vector();
            const std::span<const double> us(u.data(), static_cast<std::size_t>(n));
            const Eigen::MatrixXd dense = assemble_system(*p, st).A_sys;
            EXPECT_LT((full.matrix(us) - dense).norm(), 1e-10 * dense.norm());
            const Eigen::MatrixXd dlin = linearized_system(*p, st).A_sys;
            EXPECT_LT((lin.matrix(us) - dlin).norm(), 1e-10 * dlin.norm());
        }
    }
}

TEST(System, StateValidation) {
    const auto p = projection(6);
    try {
        assemble_system(*p, MomentState{-1.0, 0.0, 1.0, {0, 0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnphysicalState);
    }
    EXPECT_THROW(assemble_system(*p, MomentState::equilibrium(1, 0, 1, 2)), Error);
}

TEST(Source, RelaxesSplineCoefficients) {
    const MomentState s{2.0, 1.0, 1.5, {0.4, -0.2}};
    const auto src = source(s, 0.5);
    ASSERT_EQ(src.size(), 5u);
    EXPECT_EQ(src[0], 0.0);
    EXPECT_EQ(src[1], 0.0);
    EXPECT_EQ(src[2], 0.0);
    EXPECT_DOUBLE_EQ(src[3], -0.8);
    EXPECT_DOUBLE_EQ(src[4], 0.4);
    for (double x : source(MomentState::equilibrium(1, 0, 1, 4), 0.1)) EXPECT_EQ(x, 0.0);
    for (double x : source(s, INFINITY)) EXPECT_EQ(x, 0.0);
    EXPECT_THROW(source(s, 0.0), Error);
    EXPECT_THROW(source(s, -1.0), Error);
}

TEST(Reconstruct, MaxwellianAndMoments) {
    const auto p = projection(9, 3);
    MomentState s = MomentState::equilibrium(1.7, 0.4, 2.2, 6);
    for (double c : {-3.0, 0.0, 0.4, 2.5}) {
        const double ref = 1.7 / std::sqrt(2 * std::numbers::pi * 2.2) * std::exp(-(c - 0.4) * (c - 0.4) / 4.4);
        EXPECT_NEAR(reconstruct(s, p->basis, c), ref, 1e-15);
    }
    std::mt19937 rng(23);
    for (int t = 0; t < 10; ++t) {
        s = random_state(rng, 6, 0.5);
        const double sq = std::sqrt(s.theta);
        std::vector<double> cuts;
        for (double k : p->basis.grid().knots()) cuts.push_back(s.v + sq * k);
        const auto f = [&](double c) { return reconstruct(s, p->basis, c); };
        const double lo = s.v - 12 * sq, hi = s.v + 12 * sq;
        const double rho = oracle::integrate(f, lo, hi, cuts);
        const double mom = oracle::integrate([&](double c) { return c * f(c); }, lo, hi, cuts);
        const double en = oracle::integrate([&](double c) { return (c - s.v) * (c - s.v) * f(c); }, lo, hi, cuts);
        EXPECT_NEAR(rho, s.rho, 1e-9 * s.rho);
        EXPECT_NEAR(mom / rho, s.v, 1e-9);
        EXPECT_NEAR(en / rho, s.theta, 1e-9 * s.theta);
    }
}

TEST(Reconstruct, RoundTripThroughFit) {
    const KnotGrid g = build_grid(-4, 4, 11, 1);
    const auto p = std::make_shared<const ProjectionMatrices>(assemble_projection(build_fcs(g)));
    const FitResult r = fit(f_b1(), g, FitVariant::weighted_fcs);
    const MomentState s{2.0, 0.5, 1.5, r.coefficients};
    std::vector<double> cuts;
    for (double k : g.knots()) cuts.push_back(0.5 + std::sqrt(1.5) * k);
    const auto f = [&](double c) { return reconstruct(s, p->basis, c); };
    const double rho = oracle::integrate(f, -15, 16, cuts);
    EXPECT_NEAR(rho, 2.0, 1e-9);
    EXPECT_NEAR(oracle::integrate([&](double c) { return c * f(c); }, -15, 16, cuts) / rho, 0.5, 1e-9);
    // the fitted shape survives the transformation
    EXPECT_NEAR(f(0.5 + std::sqrt(1.5) * 0.3) * std::sqrt(1.5) / 2.0, r(0.3), 1e-12);
}

TEST(Macro, PressureAndHeatFlux) {
    const auto p = projection(7);
    MomentState s = MomentState::equilibrium(3.0, 1.0, 2.0, 4);
    MacroQuantities mq = macro_quantities(s, *p);
    EXPECT_NEAR(mq.pressure, 6.0, 1e-12);
    EXPECT_EQ(mq.q_bar, 0.0);
    s.kappa = {0.3, -0.2, 0.5, 0.1};
    mq = macro_quantities(s, *p);
    EXPECT_NEAR(mq.pressure, 6.0, 1e-10);
    const double expected_qbar = 0.3 * 0.00699159 - 0.2 * 0.179474 + 0.5 * 0.179474 + 0.1 * 0.00699159;
    EXPECT_NEAR(mq.q_bar, expected_qbar, 1e-6);
    EXPECT_NEAR(mq.heat_flux, 3.0 * std::pow(2.0, 1.5) * mq.q_bar, 1e-12);
    // q_bar does not depend on rho, v, theta
    MomentState s2 = s;
    s2.rho = 0.4;
    s2.v = -2;
    s2.theta = 0.7;
    EXPECT_DOUBLE_EQ(macro_quantities(s2, *p).q_bar, mq.q_bar);
}

TEST(Cache, RoundTripAndKeyCheck) {
    const auto dir = std::filesystem::temp_directory_path() / "sme_cache_test";
    std::filesystem::remove_all(dir);
    const ProjectionKey key{-4, 4, 8, 2};
    const auto p = projection(8, 2);
    std::filesystem::create_directories(dir);
    const auto file = dir / key.file_name();
    save_projection(*p, file);
    const ProjectionMatrices q = load_projection(file, key);
    EXPECT_EQ(q.M, p->M);
    EXPECT_EQ(q.M_xixidxi, p->M_xixidxi);
    EXPECT_EQ(q.V_xixidxi, p->V_xixidxi);
    EXPECT_EQ(q.heat_flux, p->heat_flux);
    EXPECT_EQ(q.basis.coefficients(2), p->basis.coefficients(2));
    try {
        load_projection(file, ProjectionKey{-4, 4, 8, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CacheFormat);
    }

    ProjectionCache cache(dir);
    const auto a = cache.get(key);
    EXPECT_EQ(a, cache.get(key));
    EXPECT_EQ(a->M, p->M);
    ProjectionCache fresh(dir / "sub");
    const auto b = fresh.get(ProjectionKey{-3, 3, 6, 1});
    EXPECT_TRUE(std::filesystem::exists(dir / "sub" / ProjectionKey{-3, 3, 6, 1}.file_name()));
    EXPECT_EQ(b->n(), 6);
    std::filesystem::remove_all(dir);
}
