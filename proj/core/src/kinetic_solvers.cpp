#include "sme/kinetic_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sme/error.hpp"
#include "sme/hyperbolicity.hpp"

namespace sme {

std::vector<double> Mesh1D::centers() const {
    std::vector<double> x(static_cast<std::size_t>(num_cells));
    for (int i = 0; i < num_cells; ++i) x[i] = center(i);
    return x;
}

Mesh1D make_mesh(double x_left, double x_right, int num_cells) {
    if (!(x_left < x_right) || num_cells < 1) {
        fail(ErrorKind::InvalidArgument, "make_mesh: need x_left < x_right and at least one cell");
    }
    return {x_left, x_right, num_cells};
}

double RelaxationRule::tau(double rho) const {
    switch (kind) {
        case Kind::collisionless: return std::numeric_limits<double>::infinity();
        case Kind::constant: return value;
        case Kind::kn_over_rho: return value / rho;
    }
    return std::numeric_limits<double>::infinity();
}

MomentState FieldState::state(int i) const {
    const auto c = cell(i);
    MomentState s;
    s.rho = c[0];
    s.v = c[1];
    s.theta = c[2];
    s.kappa.assign(c.begin() + 3, c.end());
    return s;
}

void FieldState::set_state(int i, const MomentState& s) {
    if (s.size() != num_vars) fail(ErrorKind::InvalidArgument, "set_state: wrong number of unknowns");
    auto c = cell(i);
    c[0] = s.rho;
    c[1] = s.v;
    c[2] = s.theta;
    std::copy(s.kappa.begin(), s.kappa.end(), c.begin() + 3);
}

FieldState make_field(const Mesh1D& mesh, int num_vars, const std::function<MomentState(double)>& init) {
    FieldState f;
    f.mesh = mesh;
    f.num_vars = num_vars;
    f.u.assign(static_cast<std::size_t>(mesh.num_cells) * num_vars, 0.0);
    for (int i = 0; i < mesh.num_cells; ++i) f.set_state(i, init(mesh.center(i)));
    return f;
}

void to_conservative(std::span<const double> u, std::span<double> w) {
    w[0] = u[0];
    w[1] = u[0] * u[1];
    w[2] = u[0] * (u[1] * u[1] + u[2]);
    std::copy(u.begin() + 3, u.end(), w.begin() + 3);
}

void to_primitive(std::span<const double> w, std::span<double> u) {
    const double v = w[1] / w[0];
    u[0] = w[0];
    u[1] = v;
    u[2] = w[2] / w[0] - v * v;
    std::copy(w.begin() + 3, w.end(), u.begin() + 3);
}

SmeSolver::SmeSolver(std::shared_ptr<const ProjectionMatrices> p, RelaxationRule relax, SmeSolverOptions opts)
    : op_(p, opts.linearized), relax_(relax), opts_(std::move(opts)) {
    if (relax_.kind != RelaxationRule::Kind::collisionless && !(relax_.value > 0.0)) {
        fail(ErrorKind::InvalidArgument, "relaxation parameter must be positive");
    }
    const MomentState eq = MomentState::equilibrium(1.0, 0.0, 1.0, p->count());
    c_eq_ = spectrum(*p, eq).spectral_radius;
    const int n = p->n();
    for (auto* v : {&mean_, &jump_, &adu_, &work_, &wl_, &wr_}) v->resize(n);
    if (opts_.boundary == Boundary::fixed) {
        if (opts_.left_ghost.size() != n || opts_.right_ghost.size() != n || !opts_.left_ghost.physical() ||
            !opts_.right_ghost.physical()) {
            fail(ErrorKind::InvalidArgument, "fixed boundary needs physical ghost states matching the basis");
        }
        const Eigen::VectorXd gl = opts_.left_ghost.to_vector();
        const Eigen::VectorXd gr = opts_.right_ghost.to_vector();
        ghost_l_.assign(gl.data(), gl.data() + n);
        ghost_r_.assign(gr.data(), gr.data() + n);
    }
}

double SmeSolver::spectral_radius_estimate(std::span<const double> u) const {
    if (opts_.exact_speed) {
        return spectrum_of(op_.matrix(u)).spectral_radius;
    }
    return std::abs(u[1]) + opts_.safety * c_eq_ * std::sqrt(u[2]);
}

double SmeSolver::spectral_radius_estimate(const MomentState& s) const {
    const Eigen::VectorXd u = s.to_vector();
    return spectral_radius_estimate(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
}

double SmeSolver::stable_dt(const FieldState& f, double cfl) const {
    double smax = 0.0;
    double tau_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < f.mesh.num_cells; ++i) {
        const auto c = f.cell(i);
        smax = std::max(smax, spectral_radius_estimate(c));
        tau_min = std::min(tau_min, relax_.tau(c[0]));
    }
    double dt = cfl * f.mesh.dx() / smax;
    if (std::isfinite(tau_min)) dt = std::min(dt, 0.9 * tau_min);
    return dt;
}

double SmeSolver::energy_flux(std::span<const double> u) const {
    const auto& c = op_.projection().heat_flux;
    double q_bar = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) q_bar += c(i) * u[3 + i];
    const double rho = u[0], v = u[1], theta = u[2];
    return rho * v * (v * v + 3.0 * theta) + rho * theta * std::sqrt(theta) * q_bar;
}

// Adds D^- to fl (cell left of the interface) and D^+ to fr, either may be null.
void SmeSolver::fluctuation(std::span<const double> ul, std::span<const double> ur, double alpha, double* fl,
                            double* fr) {
    const int n = op_.size();
    bool flat = true;
    for (int q = 0; q < n; ++q) flat = flat && ul[q] == ur[q];
    if (flat) return;

    if (opts_.path == PathVariables::primitive) {
        for (int q = 0; q < n; ++q) {
            mean_[q] = 0.5 * (ul[q] + ur[q]);
            jump_[q] = ur[q] - ul[q];
        }
        op_.apply(mean_, jump_, adu_);
    } else {
        to_conservative(ul, wl_);
        to_conservative(ur, wr_);
        for (int q = 0; q < n; ++q) {
            work_[q] = 0.5 * (wl_[q] + wr_[q]);
            jump_[q] = wr_[q] - wl_[q];
        }
        to_primitive(work_, mean_);
        const double rho = mean_[0], v = mean_[1], theta = mean_[2];
        // J^{-1} dw with J = d(rho, rho v, rho v^2 + rho theta)/d(rho, v, theta)
        work_ = jump_;
        work_[1] = (jump_[1] - v * jump_[0]) / rho;
        work_[2] = (jump_[2] - (v * v + theta) * jump_[0] - 2.0 * rho * v * work_[1]) / rho;
        op_.apply(mean_, work_, adu_);
        const double a0 = adu_[0], a1 = adu_[1], a2 = adu_[2];
        adu_[1] = v * a0 + rho * a1;
        adu_[2] = (v * v + theta) * a0 + 2.0 * rho * v * a1 + rho * a2;
        if (!opts_.linearized) {
            // Rows 0-2 are conservation laws; along any path their integral is the
            // flux difference. Rows 0 and 1 are linear in w, only energy needs it.
            adu_[2] = energy_flux(ur) - energy_flux(ul);
        }
    }
    for (int q = 0; q < n; ++q) {
        if (fl) fl[q] += 0.5 * (adu_[q] - alpha * jump_[q]);
        if (fr) fr[q] += 0.5 * (adu_[q] + alpha * jump_[q]);
    }
}

void SmeSolver::step(FieldState& f, double dt) {
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "step: dt must be positive");
    const int cells = f.mesh.num_cells;
    const int n = f.num_vars;
    if (n != op_.size()) fail(ErrorKind::InvalidArgument, "step: field does not match the basis");
    const std::size_t total = f.u.size();

    speed_.resize(static_cast<std::size_t>(cells));
    double tau_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cells; ++i) {
        const auto c = f.cell(i);
        speed_[i] = spectral_radius_estimate(c);
        tau_min = std::min(tau_min, relax_.tau(c[0]));
    }
    if (dt > 0.9 * tau_min) {
        std::ostringstream msg;
        msg << "explicit source is too stiff: dt = " << dt << " exceeds 0.9 * tau_min = " << 0.9 * tau_min
            << "; reduce the time step";
        fail(ErrorKind::StiffSource, msg.str());
    }

    flux_.assign(total, 0.0);
    auto acc = [&](int i) { return flux_.data() + static_cast<std::size_t>(i) * n; };
    for (int i = 0; i + 1 < cells; ++i) {
        fluctuation(f.cell(i), f.cell(i + 1), std::max(speed_[i], speed_[i + 1]), acc(i), acc(i + 1));
    }
    // zero-gradient ghosts give no jump at the outer interfaces
    if (opts_.boundary == Boundary::periodic && cells > 1) {
        fluctuation(f.cell(cells - 1), f.cell(0), std::max(speed_[cells - 1], speed_[0]), acc(cells - 1), acc(0));
    } else if (opts_.boundary == Boundary::fixed) {
        const double sl = spectral_radius_estimate(std::span<const double>(ghost_l_));
        const double sr = spectral_radius_estimate(std::span<const double>(ghost_r_));
        fluctuation(ghost_l_, f.cell(0), std::max(sl, speed_[0]), nullptr, acc(0));
        fluctuation(f.cell(cells - 1), ghost_r_, std::max(speed_[cells - 1], sr), acc(cells - 1), nullptr);
    }

    next_.resize(total);
    const double lambda = dt / f.mesh.dx();
    const bool conservative = opts_.path == PathVariables::conservative;
    for (int i = 0; i < cells; ++i) {
        const auto u = f.cell(i);
        const double* fl = acc(i);
        double* out = next_.data() + static_cast<std::size_t>(i) * n;
        const std::span<double> out_span(out, static_cast<std::size_t>(n));
        if (conservative) {
            to_conservative(u, wl_);
            for (int q = 0; q < n; ++q) wl_[q] -= lambda * fl[q];
            to_primitive(wl_, out_span);
        } else {
            for (int q = 0; q < n; ++q) out[q] = u[q] - lambda * fl[q];
        }
        const double tau = relax_.tau(u[0]);
        const double decay = std::isinf(tau) ? 0.0 : dt / tau;
        for (int q = 3; q < n; ++q) out[q] -= decay * u[q];
        for (int q = 0; q < n; ++q) {
            // wave-front tails otherwise decay into subnormals, which are very slow
            if (std::abs(out[q]) < 1e-200) out[q] = 0.0;
            if (!std::isfinite(out[q])) {
                std::ostringstream msg;
                msg << "non-finite value in cell " << i << " at t = " << f.time + dt;
                fail(ErrorKind::NanDetected, msg.str());
            }
        }
        if (!(out[0] > 0.0) || !(out[2] > 0.0)) {
            std::ostringstream msg;
            msg << "unphysical state in cell " << i << " (x = " << f.mesh.center(i) << ") at t = " << f.time + dt
                << ": rho = " << out[0] << ", theta = " << out[2];
            fail(ErrorKind::UnphysicalState, msg.str());
        }
    }
    f.u.swap(next_);
    f.time += dt;
}

void SmeSolver::advance(FieldState& f, double t_end, double dt) {
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    while (f.time < t_end - eps) {
        const double h = std::min(dt, t_end - f.time);
        step(f, h);
    }
}

void sme_step(FieldState& f, std::shared_ptr<const ProjectionMatrices> p, RelaxationRule relax, double dt,
              SmeSolverOptions opts) {
    SmeSolver solver(std::move(p), relax, opts);
    solver.step(f, dt);
}

}  // namespace sme
