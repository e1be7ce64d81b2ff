#include <cmath>
#include <cstdio>
#include <sstream>

#include "sme/error.hpp"
#include "sme/galerkin_fit.hpp"
#include "sme_bench/bench.hpp"

namespace sme::bench {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

std::string to_string(Benchmark b) {
    switch (b) {
        case Benchmark::fit: return "fit";
        case Benchmark::hyperbolicity: return "hyperbolicity";
        case Benchmark::shocktube: return "shocktube";
        case Benchmark::twobeam: return "twobeam";
        case Benchmark::shockstructure: return "shockstructure";
        case Benchmark::dvm: return "dvm";
    }
    return "?";
}

Benchmark parse_benchmark(const std::string& name) {
    for (Benchmark b : {Benchmark::fit, Benchmark::hyperbolicity, Benchmark::shocktube, Benchmark::twobeam,
                        Benchmark::shockstructure, Benchmark::dvm}) {
        if (to_string(b) == name) return b;
    }
    throw ConfigError("unknown benchmark '" + name + "'");
}

RunConfig default_config(Benchmark b) {
    RunConfig c;
    c.benchmark = b;
    c.problem = b == Benchmark::dvm ? Benchmark::shocktube : b;
    switch (b) {
        case Benchmark::fit:
            c.k = 1;
            break;
        case Benchmark::hyperbolicity:
            c.n = 5;
            break;
        case Benchmark::shocktube:
        case Benchmark::dvm:
            break;  // struct defaults are the shock tube
        case Benchmark::twobeam:
            c.n = 10;
            c.kn = 0.1;
            c.x_left = -10.0;
            c.x_right = 10.0;
            c.dt = 0.0;
            c.velocities = 600;
            break;
        case Benchmark::shockstructure:
            c.n = 7;
            c.x_left = -78.0;
            c.x_right = 78.0;
            c.num_cells = 7500;
            c.dt = 0.0;
            break;
    }
    return c;
}

void apply_quick(RunConfig& cfg) {
    if (cfg.quick) return;
    cfg.quick = true;
    cfg.num_cells = std::max(2, cfg.num_cells / 10);
    if (cfg.dt > 0.0) cfg.dt *= 10.0;
    cfg.steady_t_max = std::min(cfg.steady_t_max, 50.0);
    cfg.scan_resolution = std::min(cfg.scan_resolution, 101);
}

void validate(const RunConfig& c) {
    require(c.xi_min < c.xi_max, "xi-range must satisfy xi_min < xi_max");
    require(c.n >= 4 && c.n <= 200, "n must lie in [4, 200]");
    require(c.k >= 1 && c.k <= 3, "k must be 1, 2 or 3");
    require(c.model == "sme" || c.model == "lsme" || c.model == "dvm", "model must be sme, lsme or dvm");
    require(c.kn > 0.0, "kn must be positive (inf for collisionless)");
    require(c.tau > 0.0 && std::isfinite(c.tau), "tau must be positive and finite");
    require(c.mach > 1.0 && std::isfinite(c.mach), "mach must exceed 1");
    require(c.x_left < c.x_right, "domain must satisfy x_left < x_right");
    require(c.num_cells >= 2, "num_cells must be at least 2");
    require(c.dt >= 0.0 && std::isfinite(c.dt), "dt must be >= 0 (0 selects dt from cfl)");
    require(c.cfl > 0.0 && c.cfl <= 1.0, "cfl must lie in (0, 1]");
    require(c.t_end > 0.0 && std::isfinite(c.t_end), "t_end must be positive");
    require(c.steady_tol > 0.0 && c.steady_t_max > 0.0, "steady-state tolerance and time cap must be positive");
    require(c.velocities >= 8 && c.c_max > 0.0, "velocity grid needs >= 8 nodes and c_max > 0");
    require(c.scan_lo < c.scan_hi && c.scan_resolution >= 1, "scan range or resolution invalid");
    require(c.samples >= 0, "samples must be >= 0");
    require(!c.n_list.empty(), "n_list must not be empty");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
        require(c.n_list[i] >= 4, "n_list entries must be >= 4");
        require(i == 0 || c.n_list[i] > c.n_list[i - 1], "n_list must be strictly increasing");
    }
    const bool flow = c.benchmark != Benchmark::fit && c.benchmark != Benchmark::hyperbolicity;
    require(!flow || c.problem == Benchmark::shocktube || c.problem == Benchmark::twobeam ||
                c.problem == Benchmark::shockstructure,
            "problem must be shocktube, twobeam or shockstructure");
    try {
        parse_fit_variant(c.variant);
        named_distribution(c.distribution);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (c.benchmark == Benchmark::shockstructure || c.problem == Benchmark::shockstructure) {
        const double speed = std::sqrt(3.0) * c.mach;
        require(c.x_left < 0.0 && c.x_right > 0.0, "shock structure domain must contain x = 0");
        require(speed < c.c_max, "c_max must exceed the upstream speed");
    }
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& c) {
    std::ostringstream nl;
    for (std::size_t i = 0; i < c.n_list.size(); ++i) nl << (i ? "," : "") << c.n_list[i];
    return {
        {"benchmark", to_string(c.benchmark)},
        {"problem", to_string(c.problem)},
        {"xi_min", num(c.xi_min)},
        {"xi_max", num(c.xi_max)},
        {"n", std::to_string(c.n)},
        {"k", std::to_string(c.k)},
        {"model", c.model},
        {"kn", num(c.kn)},
        {"tau", num(c.tau)},
        {"mach", num(c.mach)},
        {"x_left", num(c.x_left)},
        {"x_right", num(c.x_right)},
        {"num_cells", std::to_string(c.num_cells)},
        {"dt", num(c.dt)},
        {"cfl", num(c.cfl)},
        {"t_end", num(c.t_end)},
        {"steady_tol", num(c.steady_tol)},
        {"steady_t_max", num(c.steady_t_max)},
        {"velocities", std::to_string(c.velocities)},
        {"c_max", num(c.c_max)},
        {"distribution", c.distribution},
        {"variant", c.variant},
        {"n_list", nl.str()},
        {"scan_lo", num(c.scan_lo)},
        {"scan_hi", num(c.scan_hi)},
        {"scan_resolution", std::to_string(c.scan_resolution)},
        {"samples", std::to_string(c.samples)},
        {"quick", c.quick ? "true" : "false"},
        {"seed", std::to_string(c.seed)},
    };
}

}  // namespace sme::bench
