#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sme/profiles.hpp"

namespace sme::bench {

enum class Benchmark { fit, hyperbolicity, shocktube, twobeam, shockstructure, dvm };

std::string to_string(Benchmark b);
Benchmark parse_benchmark(const std::string& name);

/// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Benchmark benchmark = Benchmark::shocktube;
    Benchmark problem = Benchmark::shocktube;  // which flow problem the dvm benchmark solves

    // basis
    double xi_min = -4.0;
    double xi_max = 4.0;
    int n = 13;
    int k = 1;

    // physics
    std::string model = "sme";  // sme, lsme or dvm
    double kn = 0.05;           // may be inf
    double tau = 0.01;          // constant relaxation time (shock structure)
    double mach = 1.8;

    // numerics
    double x_left = -2.0;
    double x_right = 2.0;
    int num_cells = 4000;
    double dt = 1e-4;  // 0 selects dt from cfl
    double cfl = 0.5;
    double t_end = 0.3;
    double steady_tol = 1e-8;
    double steady_t_max = 500.0;
    int velocities = 400;
    double c_max = 10.0;

    // fit
    std::string distribution = "pk";
    std::string variant = "weighted_fcs";
    std::vector<int> n_list{5, 9, 17, 33, 65};

    // hyperbolicity
    double scan_lo = -3.0;
    double scan_hi = 3.0;
    int scan_resolution = 201;
    int samples = 100;

    std::filesystem::path out_dir = "out";
    std::filesystem::path cache_dir;  // empty disables the DVM cache
    bool quick = false;
    bool check = false;
    unsigned seed = 1;
};

/// Reference settings for each benchmark.
RunConfig default_config(Benchmark b);

/// Scales num_cells by 1/10 (dt by 10 when fixed) and marks the run as quick.
void apply_quick(RunConfig& cfg);

/// Throws ConfigError on the first invalid field.
void validate(const RunConfig& cfg);

/// key = value lines, deterministic order.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

struct ErrorRow {
    std::string model;
    int n = 0;
    ErrorSet errors;
    double runtime_s = 0.0;
};

struct CheckLine {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Everything a run produced. CSV tables hold results only, so identical
/// configurations give byte-identical files; timings go to the manifest.
struct RunResult {
    RunConfig config;
    std::vector<ErrorRow> errors;
    std::vector<std::pair<std::string, Profiles>> profiles;  // written as profile_<name>.csv
    std::vector<std::pair<std::string, std::string>> tables;  // file name, CSV text
    std::vector<std::pair<std::string, std::string>> info;    // extra manifest entries
    std::vector<std::string> warnings;
    std::vector<CheckLine> checks;
    double wall_s = 0.0;

    const Profiles* find_profile(const std::string& name) const;
};

/// Reference solution with its provenance.
struct DvmRun {
    Profiles profiles;
    double runtime_s = 0.0;
    bool from_cache = false;
    std::string key;
    SteadyStateResult steady;
};

/// Flow problem setup shared by the SME and DVM runs.
struct FlowProblem {
    Mesh1D mesh;
    RelaxationRule relax;
    Boundary boundary = Boundary::zero_gradient;
    MomentState left, right;  // far-field states; kappa empty
    double x_split = 0.0;
    bool steady = false;
};

FlowProblem flow_problem(const RunConfig& cfg);

/// 64-bit FNV-1a of the configuration fields that determine the DVM solution.
std::string dvm_cache_key(const RunConfig& cfg);

DvmRun run_dvm_reference(const RunConfig& cfg);

/// One SME (or linearized SME) run on the configured problem.
struct SmeRun {
    Profiles profiles;
    double runtime_s = 0.0;
    SteadyStateResult steady;
};
SmeRun run_sme(const RunConfig& cfg);

RunResult run_fit(const RunConfig& cfg);
RunResult run_hyperbolicity(const RunConfig& cfg);
RunResult run_shocktube(const RunConfig& cfg);
RunResult run_twobeam(const RunConfig& cfg);
RunResult run_shockstructure(const RunConfig& cfg);
RunResult run_dvm(const RunConfig& cfg);
RunResult run(const RunConfig& cfg);

/// Writes manifest.txt, errors.csv (when there are error rows), profile_*.csv
/// and the extra tables into cfg.out_dir.
void write_outputs(const RunResult& r);

/// errors.csv text: model,n,err_rho,err_v,err_p,err_qbar in percent.
std::string error_table_csv(const std::vector<ErrorRow>& rows);

bool all_checks_passed(const RunResult& r);

/// Number of waves in a sampled profile: local maxima of |y_{i+1} - y_i| above
/// rel_threshold times the largest increment.
int count_waves(const std::vector<double>& y, double rel_threshold);

}  // namespace sme::bench
