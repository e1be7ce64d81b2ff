#include "sme/dvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sme/error.hpp"

namespace sme {

VelocityGrid make_velocity_grid(double c_max, int num) {
    if (!(c_max > 0.0) || num < 2) fail(ErrorKind::InvalidArgument, "velocity grid needs c_max > 0 and >= 2 nodes");
    VelocityGrid g;
    g.c_max = c_max;
    g.num = num;
    g.dc = 2.0 * c_max / num;
    g.c.resize(static_cast<std::size_t>(num));
    for (int j = 0; j < num; ++j) g.c[j] = -c_max + (j + 0.5) * g.dc;
    return g;
}

KineticMoments discrete_moments(const VelocityGrid& vel, std::span<const double> f) {
    double m0 = 0.0, m1 = 0.0;
    for (int j = 0; j < vel.num; ++j) {
        m0 += f[j];
        m1 += vel.c[j] * f[j];
    }
    KineticMoments m;
    m.rho = m0 * vel.dc;
    m.v = m1 / m0;
    double m2 = 0.0, m3 = 0.0;
    for (int j = 0; j < vel.num; ++j) {
        const double d = vel.c[j] - m.v;
        m2 += d * d * f[j];
        m3 += d * d * d * f[j];
    }
    m.p = m2 * vel.dc;
    m.theta = m.p / m.rho;
    m.q_bar = m3 * vel.dc / (m.rho * m.theta * std::sqrt(m.theta));
    return m;
}

void discrete_maxwellian(const VelocityGrid& vel, double rho, double v, double theta, std::span<double> out) {
    const int num = vel.num;
    const double dc = vel.dc;
    const double inv2t = 0.5 / theta;
    const int j0 = std::clamp(static_cast<int>(std::floor((v + vel.c_max) / dc)), 0, num - 1);
    const double d0 = vel.c[j0] - v;
    out[j0] = rho / std::sqrt(2.0 * std::numbers::pi * theta) * std::exp(-d0 * d0 * inv2t);
    const double shrink = std::exp(-dc * dc / theta);
    double r = std::exp(-(2.0 * d0 * dc + dc * dc) * inv2t);  // out[j+1] / out[j]
    for (int j = j0 + 1; j < num; ++j) {
        out[j] = out[j - 1] * r;
        r *= shrink;
    }
    r = std::exp(-(-2.0 * d0 * dc + dc * dc) * inv2t);  // out[j-1] / out[j]
    for (int j = j0 - 1; j >= 0; --j) {
        out[j] = out[j + 1] * r;
        r *= shrink;
    }
}

void conservative_maxwellian(const VelocityGrid& vel, double rho, double v, double theta, std::span<double> out) {
    double a = rho, b = v, t = theta;
    discrete_maxwellian(vel, a, b, t, out);
    for (int it = 0; it < 2; ++it) {
        const KineticMoments m = discrete_moments(vel, out);
        const double err = std::abs(m.rho / rho - 1.0) + std::abs(m.v - v) / std::sqrt(theta) + std::abs(m.theta / theta - 1.0);
        if (err < 1e-14) break;
        a *= rho / m.rho;
        b += v - m.v;
        t *= theta / m.theta;
        discrete_maxwellian(vel, a, b, t, out);
    }
}

DVMState make_dvm_state(const Mesh1D& mesh, const VelocityGrid& vel, const std::function<MomentState(double)>& init) {
    DVMState s;
    s.mesh = mesh;
    s.vel = vel;
    s.f.assign(static_cast<std::size_t>(mesh.num_cells) * vel.num, 0.0);
    for (int i = 0; i < mesh.num_cells; ++i) {
        const MomentState m = init(mesh.center(i));
        discrete_maxwellian(vel, m.rho, m.v, m.theta, s.cell(i));
    }
    return s;
}

double DvmSolver::stable_dt(const DVMState& s, double cfl) const {
    double dt = cfl * s.mesh.dx() / (s.vel.c_max - 0.5 * s.vel.dc);
    double tau_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.mesh.num_cells; ++i) tau_min = std::min(tau_min, relax_.tau(s.moments(i).rho));
    if (std::isfinite(tau_min)) dt = std::min(dt, 0.9 * tau_min);
    return dt;
}

void DvmSolver::step(DVMState& s, double dt) {
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "step: dt must be positive");
    const int cells = s.mesh.num_cells;
    const int nv = s.vel.num;
    const double lambda = dt / s.mesh.dx();
    next_.resize(s.f.size());
    maxw_.resize(static_cast<std::size_t>(nv));
    negatives_ = 0;
    const bool periodic = boundary_ == Boundary::periodic;
    const bool fixed = boundary_ == Boundary::fixed;
    if (fixed && static_cast<int>(ghost_l_.size()) != nv) {
        ghost_l_.resize(static_cast<std::size_t>(nv));
        ghost_r_.resize(static_cast<std::size_t>(nv));
        conservative_maxwellian(s.vel, left_.rho, left_.v, left_.theta, ghost_l_);
        conservative_maxwellian(s.vel, right_.rho, right_.v, right_.theta, ghost_r_);
    }

    for (int i = 0; i < cells; ++i) {
        const int il = i > 0 ? i - 1 : (periodic ? cells - 1 : 0);
        const int ir = i + 1 < cells ? i + 1 : (periodic ? 0 : cells - 1);
        const double* f = s.f.data() + static_cast<std::size_t>(i) * nv;
        const double* fl = fixed && i == 0 ? ghost_l_.data() : s.f.data() + static_cast<std::size_t>(il) * nv;
        const double* fr = fixed && i + 1 == cells ? ghost_r_.data() : s.f.data() + static_cast<std::size_t>(ir) * nv;
        double* out = next_.data() + static_cast<std::size_t>(i) * nv;

        const KineticMoments m = discrete_moments(s.vel, {f, static_cast<std::size_t>(nv)});
        if (!(m.rho > 0.0) || !(m.theta > 0.0) || !std::isfinite(m.rho) || !std::isfinite(m.theta)) {
            std::ostringstream msg;
            msg << "unphysical DVM moments in cell " << i << " at t = " << s.time << ": rho = " << m.rho
                << ", theta = " << m.theta;
            fail(ErrorKind::UnphysicalState, msg.str());
        }
        const double tau = relax_.tau(m.rho);
        if (dt > 0.9 * tau) {
            std::ostringstream msg;
            msg << "explicit source is too stiff: dt = " << dt << " exceeds 0.9 * tau = " << 0.9 * tau;
            fail(ErrorKind::StiffSource, msg.str());
        }
        const double rate = std::isinf(tau) ? 0.0 : dt / tau;
        if (rate > 0.0) conservative_maxwellian(s.vel, m.rho, m.v, m.theta, maxw_);

        for (int j = 0; j < nv; ++j) {
            const double c = s.vel.c[j];
            const double grad = c > 0.0 ? f[j] - fl[j] : fr[j] - f[j];
            double val = f[j] - lambda * c * grad;
            if (rate > 0.0) val += rate * (maxw_[j] - f[j]);
            out[j] = val;
            negatives_ += val < 0.0;
        }
    }
    s.f.swap(next_);
    s.time += dt;
}

void DvmSolver::advance(DVMState& s, double t_end, double dt) {
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    while (s.time < t_end - eps) step(s, std::min(dt, t_end - s.time));
}

void dvm_step(DVMState& s, RelaxationRule relax, double dt, Boundary boundary) {
    DvmSolver solver(relax, boundary);
    solver.step(s, dt);
}

}  // namespace sme
