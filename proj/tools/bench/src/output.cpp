#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sme_bench/bench.hpp"

#ifndef SME_VERSION
#define SME_VERSION "unknown"
#endif

namespace sme::bench {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

}  // namespace

std::string error_table_csv(const std::vector<ErrorRow>& rows) {
    std::ostringstream os;
    os << "model,n,err_rho,err_v,err_p,err_qbar\n";
    for (const ErrorRow& r : rows) {
        os << r.model << ',' << r.n << ',' << num(100 * r.errors.rho.value) << ',' << num(100 * r.errors.v.value) << ','
           << num(100 * r.errors.p.value) << ',' << num(100 * r.errors.q_bar.value) << '\n';
    }
    return os.str();
}

void write_outputs(const RunResult& r) {
    const auto& dir = r.config.out_dir;
    std::filesystem::create_directories(dir);

    std::ostringstream man;
    man << "# sme " << SME_VERSION << '\n';
    man << "eigen_version = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
#ifdef __VERSION__
    man << "compiler = " << __VERSION__ << '\n';
#endif
    man << "\n[config]\n";
    for (const auto& [k, v] : describe(r.config)) man << k << " = " << v << '\n';
    man << "\n[results]\n";
    man << "wall_clock_s = " << num(r.wall_s) << '\n';
    for (const auto& [k, v] : r.info) man << k << " = " << v << '\n';
    if (!r.warnings.empty()) {
        man << "\n[warnings]\n";
        for (const auto& w : r.warnings) man << w << '\n';
    }
    if (!r.checks.empty()) {
        man << "\n[checks]\n";
        for (const auto& c : r.checks) man << (c.passed ? "PASS " : "FAIL ") << c.name << " : " << c.detail << '\n';
    }
    write_file(dir / "manifest.txt", man.str());

    if (!r.errors.empty()) write_file(dir / "errors.csv", error_table_csv(r.errors));
    for (const auto& [name, prof] : r.profiles) {
        std::ostringstream os;
        write_profiles_csv(prof, os);
        write_file(dir / ("profile_" + name + ".csv"), os.str());
    }
    for (const auto& [name, text] : r.tables) write_file(dir / name, text);
}

}  // namespace sme::bench
