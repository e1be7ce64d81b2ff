#include <benchmark/benchmark.h>

#include "sme/dvm.hpp"
#include "sme/hyperbolicity.hpp"
#include "sme/kinetic_solvers.hpp"

using namespace sme;

namespace {

std::shared_ptr<const ProjectionMatrices> projection(int n) {
    return ProjectionCache::global().get(ProjectionKey{-4, 4, n, 1});
}

MomentState sample_state(int m) {
    MomentState s{1.3, 0.4, 1.7, {}};
    for (int i = 0; i < m; ++i) s.kappa.push_back(0.05 * ((i % 3) - 1));
    return s;
}

}  // namespace

static void BM_BSplineEval(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const KnotGrid g = build_grid(-4, 4, 13, k);
    double x = -3.9, acc = 0.0;
    for (auto _ : state) {
        for (int j = 0; j < 13; ++j) acc += eval_bspline(g, j, k, x);
        x = x > 3.9 ? -3.9 : x + 0.013;
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations() * 13);
}
BENCHMARK(BM_BSplineEval)->DenseRange(1, 3);

static void BM_AssembleProjection(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_projection(build_fcs(build_grid(-4, 4, n, 1))));
}
BENCHMARK(BM_AssembleProjection)->Arg(7)->Arg(13)->Unit(benchmark::kMillisecond);

static void BM_AssembleSystem(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto p = projection(n);
    const MomentState s = sample_state(n - 3);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_system(*p, s));
}
BENCHMARK(BM_AssembleSystem)->Arg(7)->Arg(13);

static void BM_OperatorApply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const QuasiLinearOperator op(projection(n));
    const Eigen::VectorXd u = sample_state(n - 3).to_vector();
    const Eigen::VectorXd du = Eigen::VectorXd::LinSpaced(n, -1, 1);
    Eigen::VectorXd out(n);
    for (auto _ : state) {
        op.apply({u.data(), static_cast<std::size_t>(n)}, {du.data(), static_cast<std::size_t>(n)},
                 {out.data(), static_cast<std::size_t>(n)});
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_OperatorApply)->Arg(4)->Arg(7)->Arg(10)->Arg(13);

static void BM_Spectrum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto p = projection(n);
    const MomentState s = sample_state(n - 3);
    for (auto _ : state) benchmark::DoNotOptimize(spectrum(*p, s));
}
BENCHMARK(BM_Spectrum)->Arg(7)->Arg(13);

static void BM_SmeStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SmeSolver solver(projection(n), RelaxationRule::kn_over_rho(0.05));
    FieldState f = make_field(make_mesh(-2, 2, 1000), n, [n](double x) {
        return MomentState::equilibrium(x < 0 ? 7.0 : 1.0, 0.0, 1.0, n - 3);
    });
    for (auto _ : state) solver.step(f, 1e-4);
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SmeStep)->Arg(4)->Arg(7)->Arg(10)->Arg(13)->Unit(benchmark::kMicrosecond);

static void BM_DvmStep(benchmark::State& state) {
    const int nv = static_cast<int>(state.range(0));
    DvmSolver solver(RelaxationRule::kn_over_rho(0.05));
    DVMState s = make_dvm_state(make_mesh(-2, 2, 200), make_velocity_grid(10, nv), [](double x) {
        return MomentState::equilibrium(x < 0 ? 7.0 : 1.0, 0.0, 1.0, 0);
    });
    for (auto _ : state) solver.step(s, 5e-5);
    state.SetItemsProcessed(state.iterations() * 200 * nv);
}
BENCHMARK(BM_DvmStep)->Arg(400)->Arg(600)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
