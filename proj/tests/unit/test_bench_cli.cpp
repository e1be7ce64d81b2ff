#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sme_bench/bench.hpp"

namespace fs = std::filesystem;
using namespace sme::bench;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "sme_bench_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int cli(const std::string& args) {
    const char* exe = std::getenv("SME_CLI");
    if (!exe) return -1;
    const int status = std::system((std::string(exe) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, BenchmarkDefaults) {
    const RunConfig st = default_config(Benchmark::shocktube);
    EXPECT_EQ(st.num_cells, 4000);
    EXPECT_DOUBLE_EQ(st.dt, 1e-4);
    EXPECT_DOUBLE_EQ(st.t_end, 0.3);
    EXPECT_DOUBLE_EQ(st.kn, 0.05);
    EXPECT_EQ(st.velocities, 400);
    const RunConfig tb = default_config(Benchmark::twobeam);
    EXPECT_DOUBLE_EQ(tb.x_left, -10);
    EXPECT_EQ(tb.velocities, 600);
    EXPECT_DOUBLE_EQ(tb.cfl, 0.5);
    const RunConfig ss = default_config(Benchmark::shockstructure);
    EXPECT_EQ(ss.num_cells, 7500);
    EXPECT_DOUBLE_EQ(ss.x_right, 78);
    EXPECT_EQ(ss.n, 7);
    EXPECT_DOUBLE_EQ(ss.tau, 0.01);
    for (Benchmark b : {Benchmark::fit, Benchmark::hyperbolicity, Benchmark::shocktube, Benchmark::twobeam,
                        Benchmark::shockstructure, Benchmark::dvm}) {
        EXPECT_EQ(parse_benchmark(to_string(b)), b);
        EXPECT_NO_THROW(validate(default_config(b)));
    }
    EXPECT_THROW(parse_benchmark("sod"), ConfigError);
}

TEST(Config, QuickAndValidation) {
    RunConfig c = default_config(Benchmark::shocktube);
    apply_quick(c);
    EXPECT_EQ(c.num_cells, 400);
    EXPECT_DOUBLE_EQ(c.dt, 1e-3);
    apply_quick(c);  // idempotent
    EXPECT_EQ(c.num_cells, 400);

    const auto bad = [](auto mutate) {
        RunConfig r = default_config(Benchmark::shocktube);
        mutate(r);
        EXPECT_THROW(validate(r), ConfigError);
    };
    bad([](RunConfig& r) { r.n = 3; });
    bad([](RunConfig& r) { r.k = 4; });
    bad([](RunConfig& r) { r.model = "hme"; });
    bad([](RunConfig& r) { r.xi_min = 4; });
    bad([](RunConfig& r) { r.kn = 0; });
    bad([](RunConfig& r) { r.cfl = 1.5; });
    bad([](RunConfig& r) { r.n_list = {9, 5}; });
    bad([](RunConfig& r) { r.distribution = "gamma"; });
    bad([](RunConfig& r) { r.variant = "sqrt"; });
}

TEST(Config, DescribeIsComplete) {
    const auto d = describe(default_config(Benchmark::twobeam));
    bool has_kn = false;
    for (const auto& [k, v] : d) has_kn = has_kn || (k == "kn" && v == "0.10000000000000001");
    EXPECT_TRUE(has_kn);
}

TEST(Flow, ShockStructureStates) {
    const FlowProblem p = flow_problem(default_config(Benchmark::shockstructure));
    EXPECT_NEAR(p.right.rho, 1.528, 1e-3);
    EXPECT_NEAR(p.left.v, 3.118, 1e-3);
    EXPECT_NEAR(p.right.v, 2.040, 1e-3);
    EXPECT_NEAR(p.right.theta, 2.853, 1e-3);
    // the states satisfy the jump conditions of the Euler equations
    const auto flux = [](const sme::MomentState& s) {
        return std::array<double, 3>{s.rho * s.v, s.rho * (s.v * s.v + s.theta), s.rho * s.v * (s.v * s.v + 3 * s.theta)};
    };
    const auto fl = flux(p.left), fr = flux(p.right);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(fl[i], fr[i], 1e-12 * std::abs(fl[i]));
    EXPECT_EQ(p.boundary, sme::Boundary::fixed);
}

TEST(Cache, DvmReferenceIsReused) {
    RunConfig c = default_config(Benchmark::shocktube);
    c.num_cells = 40;
    c.velocities = 40;
    c.c_max = 8;
    c.cache_dir = scratch("cache");
    const std::string key = dvm_cache_key(c);
    EXPECT_EQ(key.size(), 16u);
    EXPECT_EQ(key, dvm_cache_key(c));
    RunConfig other = c;
    other.num_cells = 41;
    EXPECT_NE(key, dvm_cache_key(other));
    other = c;
    other.n = 5;  // the basis does not affect the reference
    EXPECT_EQ(key, dvm_cache_key(other));

    const DvmRun a = run_dvm_reference(c);
    EXPECT_FALSE(a.from_cache);
    const DvmRun b = run_dvm_reference(c);
    EXPECT_TRUE(b.from_cache);
    EXPECT_EQ(a.profiles.rho, b.profiles.rho);
    EXPECT_EQ(a.profiles.q_bar, b.profiles.q_bar);
}

TEST(Tables, WaveCountAndErrorCsv) {
    std::vector<double> steps;
    for (int i = 0; i < 100; ++i) steps.push_back(i < 30 ? 1.0 : i < 60 ? 2.0 : 1.5);
    EXPECT_EQ(count_waves(steps, 0.02), 2);
    EXPECT_EQ(count_waves(std::vector<double>(10, 1.0), 0.02), 0);
    ErrorRow row;
    row.model = "sme_n7";
    row.n = 7;
    row.errors.rho.value = 0.0109;
    const std::string csv = error_table_csv({row});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,n,err_rho,err_v,err_p,err_qbar");
    EXPECT_NE(csv.find("sme_n7,7,1.09"), std::string::npos);
}

TEST(Runs, FitOfMaxwellianHasZeroCoefficients) {
    RunConfig c = default_config(Benchmark::fit);
    c.distribution = "maxwellian";
    c.n_list = {7, 9};
    const RunResult r = run(c);
    ASSERT_EQ(r.tables.size(), 2u);
    std::istringstream is(r.tables[1].second);
    std::string line;
    std::getline(is, line);
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_LT(std::abs(std::stod(line.substr(line.rfind(',') + 1))), 1e-12) << line;
    }
    EXPECT_EQ(rows, 4 + 6);
}

TEST(Runs, HyperbolicityScanContainsOrigin) {
    RunConfig c = default_config(Benchmark::hyperbolicity);
    c.scan_resolution = 11;
    c.samples = 5;
    c.check = true;
    const RunResult r = run(c);
    EXPECT_TRUE(all_checks_passed(r));
    std::string scan;
    for (const auto& [name, text] : r.tables)
        if (name == "scan_n5.csv") scan = text;
    ASSERT_FALSE(scan.empty());
    EXPECT_NE(scan.find("\n0,0,1,"), std::string::npos);
}

TEST(Runs, TwoBeamSymmetryAndOutputs) {
    RunConfig c = default_config(Benchmark::twobeam);
    c.num_cells = 200;
    c.velocities = 120;
    c.kn = INFINITY;
    c.check = true;
    c.out_dir = scratch("twobeam");
    const RunResult r = run(c);
    write_outputs(r);
    EXPECT_TRUE(all_checks_passed(r));
    EXPECT_TRUE(fs::exists(c.out_dir / "manifest.txt"));
    EXPECT_TRUE(fs::exists(c.out_dir / "profile_sme_n10.csv"));
    EXPECT_NE(slurp(c.out_dir / "manifest.txt").find("wall_clock_s"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    if (!std::getenv("SME_CLI")) GTEST_SKIP() << "SME_CLI not set";
    const fs::path d = scratch("cli");
    EXPECT_EQ(cli("fit --n-list 5,9 --out " + (d / "ok").string()), 0);
    EXPECT_EQ(cli("fit --k 7 --out " + (d / "x").string()), 2);
    EXPECT_EQ(cli("fit --no-such-flag"), 2);
    EXPECT_EQ(cli("shocktube --xi-range 4 --out " + (d / "x").string()), 2);
    EXPECT_EQ(cli("shocktube --quick --cells 40 --dt 0.01 --velocities 40 --out " + (d / "x").string()), 3);
    EXPECT_EQ(cli("shocktube --quick --check --n 4 --xi-range -1,1 --out " + (d / "bad").string()), 4);
    EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, DeterministicOutputAndConfigFile) {
    if (!std::getenv("SME_CLI")) GTEST_SKIP() << "SME_CLI not set";
    const fs::path d = scratch("determinism");
    const std::string args = "shocktube --quick --n 5 --cells 100 --velocities 80 --out ";
    ASSERT_EQ(cli(args + (d / "a").string()), 0);
    ASSERT_EQ(cli(args + (d / "b").string()), 0);
    for (const char* f : {"errors.csv", "profile_sme_n5.csv", "profile_dvm.csv"})
        EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;

    {
        std::ofstream ini(d / "run.ini");
        ini << "[shocktube]\nn = 6\ncells = 60\nvelocities = 60\nkn = 0.5\n";
    }
    ASSERT_EQ(cli("--config " + (d / "run.ini").string() + " shocktube --cells 80 --out " + (d / "c").string()), 0);
    const std::string man = slurp(d / "c" / "manifest.txt");
    EXPECT_NE(man.find("n = 6\n"), std::string::npos);
    EXPECT_NE(man.find("num_cells = 80\n"), std::string::npos);  // flag beats file
    EXPECT_NE(man.find("kn = 0.5\n"), std::string::npos);
    EXPECT_TRUE(fs::exists(d / "c" / "profile_sme_n6.csv"));
}
