#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "sme/error.hpp"
#include "sme/galerkin_fit.hpp"
#include "sme/hyperbolicity.hpp"
#include "sme_bench/bench.hpp"

namespace sme::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string pct(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g%%", 100.0 * x);
    return buf;
}

std::shared_ptr<const ProjectionMatrices> projection_for(const RunConfig& cfg) {
    static std::map<std::filesystem::path, std::unique_ptr<ProjectionCache>> caches;
    const auto dir = cfg.cache_dir.empty() ? std::filesystem::path{} : cfg.cache_dir / "projections";
    auto& slot = caches[dir];
    if (!slot) slot = std::make_unique<ProjectionCache>(dir);
    return slot->get(ProjectionKey{cfg.xi_min, cfg.xi_max, cfg.n, cfg.k});
}

MomentState with_kappa(MomentState s, int m) {
    s.kappa.assign(static_cast<std::size_t>(m), 0.0);
    return s;
}

std::string model_label(const RunConfig& cfg) { return cfg.model + "_n" + std::to_string(cfg.n); }

// FNV-1a, 64 bit
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string canonical_dvm_config(const RunConfig& c) {
    const FlowProblem p = flow_problem(c);
    std::ostringstream os;
    os << "dvm-reference 1|" << to_string(c.problem) << '|' << num(c.x_left) << '|' << num(c.x_right) << '|'
       << c.num_cells << '|' << c.velocities << '|' << num(c.c_max) << '|' << num(c.cfl) << '|'
       << static_cast<int>(p.relax.kind) << '|' << num(p.relax.value);
    if (p.steady)
        os << "|steady|" << num(c.mach) << '|' << num(c.steady_tol) << '|' << num(c.steady_t_max);
    else
        os << "|t_end|" << num(c.t_end);
    return os.str();
}

CheckLine bound_check(const std::string& name, double value, double lo, double hi) {
    std::ostringstream d;
    d << pct(value) << " in [" << pct(lo) << ", " << pct(hi) << "]";
    return {name, value >= lo && value <= hi, d.str()};
}

void add_error_info(RunResult& r, const ErrorRow& row) {
    const std::string pre = row.model + ".";
    r.info.emplace_back(pre + "err_rho", pct(row.errors.rho.value));
    r.info.emplace_back(pre + "err_v", pct(row.errors.v.value));
    r.info.emplace_back(pre + "err_p", pct(row.errors.p.value));
    r.info.emplace_back(pre + "err_qbar", pct(row.errors.q_bar.value));
}

void note_steady(RunResult& r, const std::string& who, const SteadyStateResult& s, const RunConfig& cfg) {
    r.info.emplace_back(who + ".steady_time", num(s.time));
    r.info.emplace_back(who + ".steady_residual", num(s.residual));
    r.info.emplace_back(who + ".steady_converged", s.converged ? "true" : "false");
    if (!s.converged) {
        std::ostringstream w;
        w << who << ": no steady state by t = " << cfg.steady_t_max << " (residual " << s.residual
          << ", tolerance " << cfg.steady_tol << "); profiles taken at the time cap";
        r.warnings.push_back(w.str());
    }
}

}  // namespace

const Profiles* RunResult::find_profile(const std::string& name) const {
    for (const auto& [n, p] : profiles)
        if (n == name) return &p;
    return nullptr;
}

FlowProblem flow_problem(const RunConfig& cfg) {
    FlowProblem p;
    p.mesh = make_mesh(cfg.x_left, cfg.x_right, cfg.num_cells);
    switch (cfg.problem) {
        case Benchmark::shocktube:
            p.relax = std::isinf(cfg.kn) ? RelaxationRule::collisionless() : RelaxationRule::kn_over_rho(cfg.kn);
            p.left = MomentState{7.0, 0.0, 1.0, {}};
            p.right = MomentState{1.0, 0.0, 1.0, {}};
            break;
        case Benchmark::twobeam:
            p.relax = std::isinf(cfg.kn) ? RelaxationRule::collisionless() : RelaxationRule::constant(cfg.kn * cfg.t_end);
            p.left = MomentState{1.0, 0.5, 1.0, {}};
            p.right = MomentState{1.0, -0.5, 1.0, {}};
            break;
        case Benchmark::shockstructure: {
            const double ma2 = cfg.mach * cfg.mach;
            const double u_l = std::sqrt(3.0) * cfg.mach;
            p.relax = RelaxationRule::constant(cfg.tau);
            p.boundary = Boundary::fixed;
            p.left = MomentState{1.0, u_l, 1.0, {}};
            p.right = MomentState{2.0 * ma2 / (ma2 + 1.0), u_l * (ma2 + 1.0) / (2.0 * ma2),
                                  (1.0 + ma2) * (3.0 * ma2 - 1.0) / (4.0 * ma2), {}};
            p.steady = true;
            break;
        }
        default:
            throw ConfigError("benchmark " + to_string(cfg.problem) + " is not a flow problem");
    }
    return p;
}

std::string dvm_cache_key(const RunConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_dvm_config(cfg))));
    return buf;
}

DvmRun run_dvm_reference(const RunConfig& cfg) {
    DvmRun out;
    out.key = dvm_cache_key(cfg);
    const std::string canonical = canonical_dvm_config(cfg);
    const auto dir = cfg.cache_dir.empty() ? std::filesystem::path{} : cfg.cache_dir / "dvm";
    const auto csv = dir / ("dvm_" + out.key + ".csv");
    const auto meta = dir / ("dvm_" + out.key + ".meta");

    if (!dir.empty() && std::filesystem::exists(csv) && std::filesystem::exists(meta)) {
        std::ifstream m(meta);
        std::string line, stored;
        std::getline(m, stored);
        if (stored == canonical) {
            while (std::getline(m, line)) {
                std::istringstream ls(line);
                std::string key;
                ls >> key;
                if (key == "runtime_s") ls >> out.runtime_s;
                if (key == "steady_time") ls >> out.steady.time;
                if (key == "steady_steps") ls >> out.steady.steps;
                if (key == "steady_residual") ls >> out.steady.residual;
                if (key == "steady_converged") ls >> out.steady.converged;
            }
            std::ifstream is(csv);
            try {
                out.profiles = read_profiles_csv(is);
                out.from_cache = out.profiles.size() == static_cast<std::size_t>(cfg.num_cells);
            } catch (const std::exception&) {
                out.from_cache = false;
            }
            if (out.from_cache) return out;
        }
    }

    const FlowProblem prob = flow_problem(cfg);
    const auto t0 = Clock::now();
    const VelocityGrid vel = make_velocity_grid(cfg.c_max, cfg.velocities);
    DVMState s = make_dvm_state(prob.mesh, vel, [&](double x) { return x < prob.x_split ? prob.left : prob.right; });
    DvmSolver solver = prob.boundary == Boundary::fixed ? DvmSolver(prob.relax, prob.left, prob.right)
                                                        : DvmSolver(prob.relax, prob.boundary);
    const double dt = solver.stable_dt(s, cfg.cfl);
    if (prob.steady)
        out.steady = march_to_steady(solver, s, dt, cfg.steady_tol, cfg.steady_t_max, false);
    else
        solver.advance(s, cfg.t_end, dt);
    out.runtime_s = seconds_since(t0);
    out.profiles = dvm_profiles(s);

    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        const auto tmp_csv = csv.string() + ".tmp", tmp_meta = meta.string() + ".tmp";
        {
            std::ofstream os(tmp_csv);
            write_profiles_csv(out.profiles, os);
        }
        {
            std::ofstream os(tmp_meta);
            os << canonical << '\n'
               << "runtime_s " << num(out.runtime_s) << '\n'
               << "steady_time " << num(out.steady.time) << '\n'
               << "steady_steps " << out.steady.steps << '\n'
               << "steady_residual " << num(out.steady.residual) << '\n'
               << "steady_converged " << out.steady.converged << '\n';
        }
        std::filesystem::rename(tmp_csv, csv);
        std::filesystem::rename(tmp_meta, meta);
    }
    return out;
}

SmeRun run_sme(const RunConfig& cfg) {
    const auto p = projection_for(cfg);
    const FlowProblem prob = flow_problem(cfg);
    const int m = cfg.n - 3;
    SmeSolverOptions opts;
    opts.linearized = cfg.model == "lsme";
    opts.boundary = prob.boundary;
    opts.left_ghost = with_kappa(prob.left, m);
    opts.right_ghost = with_kappa(prob.right, m);

    SmeRun out;
    const auto t0 = Clock::now();
    SmeSolver solver(p, prob.relax, opts);
    FieldState f = make_field(prob.mesh, cfg.n, [&](double x) { return x < prob.x_split ? opts.left_ghost : opts.right_ghost; });
    const double dt = cfg.dt > 0.0 ? cfg.dt : solver.stable_dt(f, cfg.cfl);
    if (prob.steady)
        out.steady = march_to_steady(solver, f, dt, cfg.steady_tol, cfg.steady_t_max, false);
    else
        solver.advance(f, cfg.t_end, dt);
    out.runtime_s = seconds_since(t0);
    out.profiles = sme_profiles(f, *p);
    return out;
}

RunResult run_fit(const RunConfig& cfg) {
    RunResult r;
    r.config = cfg;
    const Distribution d = named_distribution(cfg.distribution);
    const FitVariant variant = parse_fit_variant(cfg.variant);
    const ConvergenceTable table = convergence_study(d, variant, cfg.k, {cfg.xi_min, cfg.xi_max}, cfg.n_list);

    std::ostringstream conv, coef;
    conv << "n,delta_xi,l2_error,order\n";
    coef << "n,index,coefficient\n";
    for (const ConvergenceRow& row : table.rows) {
        conv << row.n << ',' << num(row.delta_xi) << ',' << num(row.l2_error) << ','
             << (row.order ? num(*row.order) : std::string("")) << '\n';
        const FitResult fr = fit(d, build_grid(cfg.xi_min, cfg.xi_max, row.n, cfg.k), variant);
        for (std::size_t i = 0; i < fr.coefficients.size(); ++i) coef << row.n << ',' << i << ',' << num(fr.coefficients[i]) << '\n';
        for (const auto& w : fr.warnings) r.warnings.push_back("n = " + std::to_string(row.n) + ": " + w);
    }
    r.tables.emplace_back("convergence.csv", conv.str());
    r.tables.emplace_back("coefficients.csv", coef.str());
    r.info.emplace_back("plateau_estimate", num(table.plateau_estimate));
    const auto order = table.observed_order();
    r.info.emplace_back("observed_order", order ? num(*order) : "none");

    if (cfg.check) {
        bool monotone = true;
        for (std::size_t i = 1; i < table.rows.size(); ++i) {
            if (table.rows[i - 1].l2_error > 10.0 * table.plateau_estimate)
                monotone = monotone && table.rows[i].l2_error < table.rows[i - 1].l2_error;
        }
        r.checks.push_back({"errors decrease until the plateau", monotone, ""});
    }
    return r;
}

RunResult run_hyperbolicity(const RunConfig& cfg) {
    RunResult r;
    r.config = cfg;
    const auto p = projection_for(cfg);
    const bool lin = cfg.model == "lsme";
    const int m = cfg.n - 3;
    const MomentState origin = MomentState::equilibrium(1, 0, 1, m);

    const SpectrumReport at_origin = spectrum(*p, origin, kDefaultHyperbolicityTol, lin);
    std::ostringstream spec;
    spec << "re,im\n";
    for (const auto& ev : at_origin.eigenvalues) spec << num(ev.real()) << ',' << num(ev.imag()) << '\n';
    r.tables.emplace_back("spectrum_origin.csv", spec.str());

    if (m >= 2) {
        const auto [i, j] = center_indices(m);
        const ScanAxis ax{cfg.scan_lo, cfg.scan_hi, cfg.scan_resolution};
        const DomainScan scan = scan_domain(*p, origin, i, j, ax, ax, lin);
        std::ostringstream os;
        write_scan_csv(scan, os);
        r.tables.emplace_back("scan_n" + std::to_string(cfg.n) + ".csv", os.str());
        r.info.emplace_back("scan_indices", std::to_string(i) + "," + std::to_string(j));
        r.info.emplace_back("area_fraction", num(scan.area_fraction()));
        const BoundingBox bb = scan.bounding_box();
        if (!bb.empty)
            r.info.emplace_back("bounding_box", num(bb.lo_i) + "," + num(bb.hi_i) + "," + num(bb.lo_j) + "," + num(bb.hi_j));
    }

    // shift/scale law on random states
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> uv(-3, 3), ut(0.2, 5), uk(-0.3, 0.3);
    double worst = 0.0;
    for (int s = 0; s < cfg.samples; ++s) {
        MomentState st{1.0, uv(rng), ut(rng), {}};
        for (int q = 0; q < m; ++q) st.kappa.push_back(uk(rng));
        MomentState base = st;
        base.v = 0.0;
        base.theta = 1.0;
        const SpectrumReport a = spectrum(*p, st, kDefaultHyperbolicityTol, lin);
        const SpectrumReport b = spectrum(*p, base, kDefaultHyperbolicityTol, lin);
        for (const auto& beta : b.eigenvalues) {
            const std::complex<double> target = st.v + std::sqrt(st.theta) * beta;
            double best = INFINITY;
            for (const auto& lam : a.eigenvalues) best = std::min(best, std::abs(lam - target));
            worst = std::max(worst, best / std::max(1.0, std::abs(target)));
        }
    }
    r.info.emplace_back("origin_hyperbolic", at_origin.hyperbolic ? "true" : "false");
    r.info.emplace_back("covariance_max_rel_deviation", num(worst));
    if (cfg.check) {
        r.checks.push_back({"origin hyperbolic", at_origin.hyperbolic, "max_imag " + num(at_origin.max_imag)});
        r.checks.push_back({"shift/scale law", worst < 1e-9, "max relative deviation " + num(worst)});
    }
    return r;
}

RunResult run_shocktube(const RunConfig& cfg) {
    RunResult r;
    r.config = cfg;
    const DvmRun ref = run_dvm_reference(cfg);
    r.info.emplace_back("dvm.cache_key", ref.key);
    r.info.emplace_back("dvm.from_cache", ref.from_cache ? "true" : "false");
    r.info.emplace_back("dvm.runtime_s", num(ref.runtime_s));
    r.profiles.emplace_back("dvm", ref.profiles);
    if (cfg.model == "dvm") return r;

    const SmeRun sme = run_sme(cfg);
    ErrorRow row{model_label(cfg), cfg.n, error_norms(sme.profiles, ref.profiles), sme.runtime_s};
    r.errors.push_back(row);
    r.profiles.emplace_back(model_label(cfg), sme.profiles);
    r.info.emplace_back(model_label(cfg) + ".runtime_s", num(sme.runtime_s));
    add_error_info(r, row);
    if (cfg.check) {
        const double s = cfg.quick ? 2.0 : 1.0;
        r.checks.push_back(bound_check("err_rho <= " + pct(0.01 * s), row.errors.rho.value, 0.0, 0.01 * s));
        r.checks.push_back(bound_check("err_p <= " + pct(0.01 * s), row.errors.p.value, 0.0, 0.01 * s));
        r.checks.push_back(bound_check("err_v <= " + pct(0.05 * s), row.errors.v.value, 0.0, 0.05 * s));
    }
    return r;
}

RunResult run_twobeam(const RunConfig& cfg) {
    RunResult r;
    r.config = cfg;
    const bool collisionless = std::isinf(cfg.kn);
    std::optional<DvmRun> ref;
    if (!collisionless || cfg.model == "dvm") {
        ref = run_dvm_reference(cfg);
        r.info.emplace_back("dvm.cache_key", ref->key);
        r.info.emplace_back("dvm.from_cache", ref->from_cache ? "true" : "false");
        r.info.emplace_back("dvm.runtime_s", num(ref->runtime_s));
        r.profiles.emplace_back("dvm", ref->profiles);
    }
    if (cfg.model == "dvm") return r;

    const SmeRun sme = run_sme(cfg);
    r.profiles.emplace_back(model_label(cfg), sme.profiles);
    r.info.emplace_back(model_label(cfg) + ".runtime_s", num(sme.runtime_s));

    // the data are mirror symmetric, so q_bar must be odd about x = 0
    const auto& q = sme.profiles.q_bar;
    double asym = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        asym = std::max(asym, std::abs(q[i] + q[q.size() - 1 - i]));
        scale = std::max(scale, std::abs(q[i]));
    }
    const int waves = count_waves(sme.profiles.p, 0.02);
    r.info.emplace_back("qbar_odd_deviation", num(asym));
    r.info.emplace_back("pressure_waves", std::to_string(waves));

    if (ref) {
        ErrorRow row{model_label(cfg), cfg.n, error_norms(sme.profiles, ref->profiles), sme.runtime_s};
        r.errors.push_back(row);
        add_error_info(r, row);
        if (cfg.check) {
            const double s = cfg.quick ? 2.0 : 1.0;
            r.checks.push_back(bound_check("err_p <= " + pct(0.02 * s), row.errors.p.value, 0.0, 0.02 * s));
            r.checks.push_back(bound_check("err_qbar <= " + pct(0.10 * s), row.errors.q_bar.value, 0.0, 0.10 * s));
        }
    }
    if (cfg.check) {
        r.checks.push_back({"q_bar odd about x = 0", asym <= 1e-6 * std::max(1.0, scale), "deviation " + num(asym)});
        if (collisionless)
            r.checks.push_back({"pressure wave count <= n", waves <= cfg.n, std::to_string(waves) + " waves"});
    }
    return r;
}

RunResult run_shockstructure(const RunConfig& cfg) {
    RunResult r;
    r.config = cfg;
    const FlowProblem prob = flow_problem(cfg);
    const DvmRun ref = run_dvm_reference(cfg);
    r.info.emplace_back("dvm.cache_key", ref.key);
    r.info.emplace_back("dvm.from_cache", ref.from_cache ? "true" : "false");
    r.info.emplace_back("dvm.runtime_s", num(ref.runtime_s));
    note_steady(r, "dvm", ref.steady, cfg);
    r.profiles.emplace_back("dvm", ref.profiles);

    // endpoint states against the jump conditions
    const Profiles& d = ref.profiles;
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double rh = std::max({rel(d.rho.front(), prob.left.rho), rel(d.v.front(), prob.left.v),
                                rel(d.theta.front(), prob.left.theta), rel(d.rho.back(), prob.right.rho),
                                rel(d.v.back(), prob.right.v), rel(d.theta.back(), prob.right.theta)});
    r.info.emplace_back("dvm.endpoint_max_rel_deviation", num(rh));
    const AlignedProfiles dref = shock_align_and_rescale(d, prob.left.rho, prob.right.rho);
    r.profiles.emplace_back("dvm_aligned", dref.profiles);
    if (cfg.check) r.checks.push_back(bound_check("DVM endpoints match jump conditions", rh, 0.0, 0.005));
    if (cfg.model == "dvm") return r;

    const SmeRun sme = run_sme(cfg);
    note_steady(r, model_label(cfg), sme.steady, cfg);
    const AlignedProfiles al = shock_align_and_rescale(sme.profiles, prob.left.rho, prob.right.rho);
    r.profiles.emplace_back(model_label(cfg), sme.profiles);
    r.profiles.emplace_back(model_label(cfg) + "_aligned", al.profiles);
    ErrorRow row{model_label(cfg), cfg.n, error_norms(al.profiles, dref.profiles), sme.runtime_s};
    r.errors.push_back(row);
    r.info.emplace_back(model_label(cfg) + ".runtime_s", num(sme.runtime_s));
    add_error_info(r, row);
    if (cfg.check) {
        // Table 1 SME row, factor 2 either way (4 in quick mode)
        const double f = cfg.quick ? 4.0 : 2.0;
        r.checks.push_back(bound_check("err_rho near 1.09%", row.errors.rho.value, 0.0109 / f, 0.0109 * f));
        r.checks.push_back(bound_check("err_v near 0.20%", row.errors.v.value, 0.0020 / f, 0.0020 * f));
        r.checks.push_back(bound_check("err_p near 0.59%", row.errors.p.value, 0.0059 / f, 0.0059 * f));
        r.checks.push_back(bound_check("err_qbar near 14.03%", row.errors.q_bar.value, 0.1403 / f, 0.1403 * f));
    }
    return r;
}

RunResult run_dvm(const RunConfig& cfg) {
    RunResult r;
    r.config = cfg;
    const DvmRun ref = run_dvm_reference(cfg);
    r.info.emplace_back("dvm.cache_key", ref.key);
    r.info.emplace_back("dvm.from_cache", ref.from_cache ? "true" : "false");
    r.info.emplace_back("dvm.runtime_s", num(ref.runtime_s));
    if (cfg.problem == Benchmark::shockstructure) note_steady(r, "dvm", ref.steady, cfg);
    r.profiles.emplace_back("dvm", ref.profiles);
    return r;
}

RunResult run(const RunConfig& cfg) {
    validate(cfg);
    const auto t0 = Clock::now();
    RunResult r;
    switch (cfg.benchmark) {
        case Benchmark::fit: r = run_fit(cfg); break;
        case Benchmark::hyperbolicity: r = run_hyperbolicity(cfg); break;
        case Benchmark::shocktube: r = run_shocktube(cfg); break;
        case Benchmark::twobeam: r = run_twobeam(cfg); break;
        case Benchmark::shockstructure: r = run_shockstructure(cfg); break;
        case Benchmark::dvm: r = run_dvm(cfg); break;
    }
    r.wall_s = seconds_since(t0);
    return r;
}

bool all_checks_passed(const RunResult& r) {
    for (const CheckLine& c : r.checks)
        if (!c.passed) return false;
    return true;
}

int count_waves(const std::vector<double>& y, double rel_threshold) {
    if (y.size() < 3) return 0;
    std::vector<double> d(y.size() - 1);
    double big = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        d[i] = std::abs(y[i + 1] - y[i]);
        big = std::max(big, d[i]);
    }
    if (big == 0.0) return 0;
    int waves = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double l = i > 0 ? d[i - 1] : 0.0;
        const double r = i + 1 < d.size() ? d[i + 1] : 0.0;
        if (d[i] > rel_threshold * big && d[i] >= l && d[i] > r) ++waves;
    }
    return waves;
}

}  // namespace sme::bench
