// sme: benchmark and analysis driver.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sme/error.hpp"
#include "sme_bench/bench.hpp"

namespace bench = sme::bench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

struct Flags {
    bench::RunConfig cfg;
    std::string xi_range;
    std::string scan_range;
    std::string kn;
    std::string problem;
    std::vector<int> n_list;
};

double parse_real(const std::string& s, const std::string& what) {
    if (s == "inf" || s == "Inf" || s == "infinity") return INFINITY;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw bench::ConfigError("cannot parse " + what + " '" + s + "'");
    return v;
}

std::pair<double, double> parse_range(const std::string& s, const std::string& what) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw bench::ConfigError(what + " must look like a,b");
    return {parse_real(s.substr(0, comma), what), parse_real(s.substr(comma + 1), what)};
}

void add_common(CLI::App* sub, Flags& f) {
    auto& c = f.cfg;
    sub->add_option("--out", c.out_dir, "Output directory");
    sub->add_flag("--quick", c.quick, "Tenfold coarser mesh, relaxed checks");
    sub->add_option("--model", c.model, "sme, lsme or dvm")->check(CLI::IsMember({"sme", "lsme", "dvm"}));
    sub->add_option("--n", c.n, "Number of B-splines");
    sub->add_option("--k", c.k, "Spline order");
    sub->add_option("--xi-range", f.xi_range, "Velocity-space grid range a,b");
    sub->add_option("--kn", f.kn, "Knudsen number (inf for collisionless)");
    sub->add_flag("--check", c.check, "Evaluate acceptance checks, exit 4 on failure");
    sub->add_option("--seed", c.seed, "Seed for randomized checks");
    sub->add_option("--cache-dir", c.cache_dir, "Projection and DVM reference cache");
    sub->add_option("--cells", c.num_cells, "Number of cells");
    sub->add_option("--dt", c.dt, "Time step (0 selects it from --cfl)");
    sub->add_option("--cfl", c.cfl, "CFL number");
    sub->add_option("--t-end", c.t_end, "Final time");
    sub->add_option("--x-left", c.x_left, "Left end of the domain");
    sub->add_option("--x-right", c.x_right, "Right end of the domain");
    sub->add_option("--velocities", c.velocities, "DVM velocity nodes");
    sub->add_option("--c-max", c.c_max, "DVM velocity cutoff");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spline moment equations: fits, hyperbolicity scans and 1D benchmarks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI file; section names select the subcommand");

    std::map<std::string, Flags> flags;
    std::map<std::string, CLI::App*> subs;
    const std::vector<std::pair<bench::Benchmark, std::string>> commands{
        {bench::Benchmark::fit, "Galerkin fits and convergence tables"},
        {bench::Benchmark::hyperbolicity, "Spectra and hyperbolicity domain scans"},
        {bench::Benchmark::shocktube, "Sod-type shock tube against the DVM reference"},
        {bench::Benchmark::twobeam, "Two colliding beams"},
        {bench::Benchmark::shockstructure, "Stationary shock structure, Ma = 1.8"},
        {bench::Benchmark::dvm, "DVM reference solution only"},
    };
    for (const auto& [b, help] : commands) {
        const std::string name = bench::to_string(b);
        Flags& f = flags[name];
        f.cfg = bench::default_config(b);
        f.n_list = f.cfg.n_list;
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, f);
        sub->add_option("--tau", f.cfg.tau, "Constant relaxation time");
        sub->add_option("--mach", f.cfg.mach, "Upstream Mach number");
        sub->add_option("--t-max", f.cfg.steady_t_max, "Time cap of the steady-state march");
        sub->add_option("--steady-tol", f.cfg.steady_tol, "Steady-state tolerance on |d rho/dt|");
        sub->add_option("--distribution", f.cfg.distribution, "maxwellian, pk, b1, b2 or wb");
        sub->add_option("--variant", f.cfg.variant, "unweighted, weighted or weighted_fcs");
        sub->add_option("--n-list", f.n_list, "Increasing list of n for fit studies")->delimiter(',');
        sub->add_option("--resolution", f.cfg.scan_resolution, "Scan points per axis");
        sub->add_option("--scan-range", f.scan_range, "Scan range a,b");
        sub->add_option("--samples", f.cfg.samples, "Random states for the covariance check");
        sub->add_option("--problem", f.problem, "Flow problem of the dvm subcommand")
            ->check(CLI::IsMember({"shocktube", "twobeam", "shockstructure"}));
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    std::string chosen;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) chosen = name;
    Flags& f = flags[chosen];
    CLI::App* sub = subs[chosen];
    bench::RunConfig& cfg = f.cfg;

    try {
        if (!f.xi_range.empty()) std::tie(cfg.xi_min, cfg.xi_max) = parse_range(f.xi_range, "xi-range");
        if (!f.scan_range.empty()) std::tie(cfg.scan_lo, cfg.scan_hi) = parse_range(f.scan_range, "scan-range");
        if (!f.kn.empty()) cfg.kn = parse_real(f.kn, "kn");
        cfg.n_list = f.n_list;
        if (!f.problem.empty()) {
            cfg.problem = bench::parse_benchmark(f.problem);
            if (cfg.benchmark == bench::Benchmark::dvm) {
                // problem defaults, keeping explicit flags
                bench::RunConfig d = bench::default_config(cfg.problem);
                d.benchmark = bench::Benchmark::dvm;
                d.model = "dvm";
                if (sub->count("--cells")) d.num_cells = cfg.num_cells;
                if (sub->count("--dt")) d.dt = cfg.dt;
                if (sub->count("--t-end")) d.t_end = cfg.t_end;
                if (sub->count("--velocities")) d.velocities = cfg.velocities;
                if (sub->count("--c-max")) d.c_max = cfg.c_max;
                if (!f.kn.empty()) d.kn = cfg.kn;
                d.out_dir = cfg.out_dir;
                d.cache_dir = cfg.cache_dir;
                d.quick = cfg.quick;
                d.check = cfg.check;
                cfg = d;
            }
        }
        if (cfg.quick) {
            const int cells = cfg.num_cells;
            const double dt = cfg.dt, t_max = cfg.steady_t_max;
            const int res = cfg.scan_resolution;
            cfg.quick = false;
            bench::apply_quick(cfg);
            if (sub->count("--cells")) cfg.num_cells = cells;
            if (sub->count("--dt")) cfg.dt = dt;
            if (sub->count("--t-max")) cfg.steady_t_max = t_max;
            if (sub->count("--resolution")) cfg.scan_resolution = res;
        }
        bench::validate(cfg);
    } catch (const bench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    bench::RunResult result;
    try {
        result = bench::run(cfg);
        bench::write_outputs(result);
    } catch (const bench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sme::Error& e) {
        std::cerr << chosen << " failed: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << chosen << " failed: " << e.what() << '\n';
        return kExitSolver;
    }

    std::cout << chosen << " finished in " << result.wall_s << " s, output in " << cfg.out_dir.string() << '\n';
    if (!result.errors.empty()) std::cout << bench::error_table_csv(result.errors);
    for (const auto& [k, v] : result.info) std::cout << "  " << k << " = " << v << '\n';
    for (const auto& w : result.warnings) std::cout << "warning: " << w << '\n';
    for (const auto& c : result.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " : " << c.detail << '\n';
    if (cfg.check && !bench::all_checks_passed(result)) return kExitCheck;
    return 0;
}
