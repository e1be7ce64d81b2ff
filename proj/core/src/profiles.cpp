#include "sme/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sme/error.hpp"

namespace sme {

Profiles sme_profiles(const FieldState& f, const ProjectionMatrices& p) {
    Profiles prof;
    const int cells = f.mesh.num_cells;
    for (auto* col : {&prof.x, &prof.rho, &prof.v, &prof.theta, &prof.p, &prof.q_bar}) col->resize(cells);
    for (int i = 0; i < cells; ++i) {
        const MomentState s = f.state(i);
        const MacroQuantities mq = macro_quantities(s, p);
        prof.x[i] = f.mesh.center(i);
        prof.rho[i] = s.rho;
        prof.v[i] = s.v;
        prof.theta[i] = s.theta;
        prof.p[i] = mq.pressure;
        prof.q_bar[i] = mq.q_bar;
    }
    return prof;
}

Profiles dvm_profiles(const DVMState& s) {
    Profiles prof;
    const int cells = s.mesh.num_cells;
    for (auto* col : {&prof.x, &prof.rho, &prof.v, &prof.theta, &prof.p, &prof.q_bar}) col->resize(cells);
    for (int i = 0; i < cells; ++i) {
        const KineticMoments m = s.moments(i);
        prof.x[i] = s.mesh.center(i);
        prof.rho[i] = m.rho;
        prof.v[i] = m.v;
        prof.theta[i] = m.theta;
        prof.p[i] = m.p;
        prof.q_bar[i] = m.q_bar;
    }
    return prof;
}

void write_profiles_csv(const Profiles& prof, std::ostream& os) {
    os << "x,rho,v,theta,p,q_bar\n";
    char buf[160];
    for (std::size_t i = 0; i < prof.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", prof.x[i], prof.rho[i], prof.v[i],
                      prof.theta[i], prof.p[i], prof.q_bar[i]);
        os << buf;
    }
}

Profiles read_profiles_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,rho,v,theta,p,q_bar", 0) != 0) {
        fail(ErrorKind::CacheFormat, "profile CSV: unexpected header");
    }
    Profiles prof;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double vals[6];
        char sep = 0;
        for (int c = 0; c < 6; ++c) {
            if (!(row >> vals[c]) || (c < 5 && !(row >> sep))) fail(ErrorKind::CacheFormat, "profile CSV: bad row");
        }
        prof.x.push_back(vals[0]);
        prof.rho.push_back(vals[1]);
        prof.v.push_back(vals[2]);
        prof.theta.push_back(vals[3]);
        prof.p.push_back(vals[4]);
        prof.q_bar.push_back(vals[5]);
    }
    return prof;
}

namespace {

std::vector<double> resample(const std::vector<double>& xs, const std::vector<double>& ys,
                             const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= xs.front()) {
            out[i] = ys.front();
        } else if (x[i] >= xs.back()) {
            out[i] = ys.back();
        } else {
            const auto it = std::upper_bound(xs.begin(), xs.end(), x[i]);
            const std::size_t r = static_cast<std::size_t>(it - xs.begin());
            const double t = (x[i] - xs[r - 1]) / (xs[r] - xs[r - 1]);
            out[i] = (1.0 - t) * ys[r - 1] + t * ys[r];
        }
    }
    return out;
}

}  // namespace

Profiles interpolate(const Profiles& prof, const std::vector<double>& x) {
    if (prof.size() == 0) fail(ErrorKind::InvalidArgument, "interpolate: empty profile");
    Profiles out;
    out.x = x;
    out.rho = resample(prof.x, prof.rho, x);
    out.v = resample(prof.x, prof.v, x);
    out.theta = resample(prof.x, prof.theta, x);
    out.p = resample(prof.x, prof.p, x);
    out.q_bar = resample(prof.x, prof.q_bar, x);
    return out;
}

ErrorNorm relative_l1(const std::vector<double>& x, const std::vector<double>& q, const std::vector<double>& q_ref) {
    if (x.size() != q.size() || x.size() != q_ref.size()) fail(ErrorKind::InvalidArgument, "relative_l1: size mismatch");
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = 0.5 * (x[i + 1] - x[i]);
        diff += h * (std::abs(q[i] - q_ref[i]) + std::abs(q[i + 1] - q_ref[i + 1]));
        ref += h * (std::abs(q_ref[i]) + std::abs(q_ref[i + 1]));
    }
    if (ref < 1e-14) return {diff, true};
    return {diff / ref, false};
}

ErrorSet error_norms(const Profiles& sol, const Profiles& ref) {
    const Profiles r = sol.x == ref.x ? ref : interpolate(ref, sol.x);
    return {relative_l1(sol.x, sol.rho, r.rho), relative_l1(sol.x, sol.v, r.v), relative_l1(sol.x, sol.p, r.p),
            relative_l1(sol.x, sol.q_bar, r.q_bar)};
}

double level_crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        const double a = y[i] - level;
        const double b = y[i + 1] - level;
        if (a == 0.0) return x[i];
        if ((a < 0.0) != (b < 0.0)) return x[i] + (x[i + 1] - x[i]) * a / (a - b);
    }
    if (!y.empty() && y.back() == level) return x.back();
    fail(ErrorKind::NoCrossing, "profile never crosses the requested level");
}

AlignedProfiles shock_align_and_rescale(const Profiles& prof, double rho_left, double rho_right) {
    if (rho_left == rho_right) fail(ErrorKind::InvalidArgument, "shock_align_and_rescale: rho_left == rho_right");
    AlignedProfiles out{prof, 0.0};
    for (double& r : out.profiles.rho) r = (r - rho_left) / (rho_right - rho_left);
    out.shift = -level_crossing(out.profiles.x, out.profiles.rho, 0.5);
    for (double& x : out.profiles.x) x += out.shift;
    return out;
}

namespace {

template <class Solver, class State, class RhoOf>
SteadyStateResult march(Solver& solver, State& s, int cells, double dt, double tol, double t_max, bool strict, RhoOf rho_of) {
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "march_to_steady: dt must be positive");
    SteadyStateResult res;
    std::vector<double> before(static_cast<std::size_t>(cells));
    while (s.time < t_max) {
        for (int i = 0; i < cells; ++i) before[i] = rho_of(s, i);
        solver.step(s, dt);
        ++res.steps;
        double change = 0.0;
        for (int i = 0; i < cells; ++i) change = std::max(change, std::abs(rho_of(s, i) - before[i]));
        res.residual = change / dt;
        res.time = s.time;
        if (res.residual < tol) {
            res.converged = true;
            return res;
        }
    }
    if (!strict) return res;
    std::ostringstream msg;
    msg << "no steady state by t = " << t_max << " (residual " << res.residual << ", tolerance " << tol << ")";
    fail(ErrorKind::NoSteadyState, msg.str());
}

}  // namespace

SteadyStateResult march_to_steady(SmeSolver& solver, FieldState& f, double dt, double tol, double t_max, bool strict) {
    return march(solver, f, f.mesh.num_cells, dt, tol, t_max, strict, [](const FieldState& s, int i) { return s.cell(i)[0]; });
}

SteadyStateResult march_to_steady(DvmSolver& solver, DVMState& s, double dt, double tol, double t_max, bool strict) {
    return march(solver, s, s.mesh.num_cells, dt, tol, t_max, strict, [](const DVMState& st, int i) { return st.moments(i).rho; });
}

}  // namespace sme
