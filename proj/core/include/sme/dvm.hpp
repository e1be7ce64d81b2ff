#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sme/kinetic_solvers.hpp"

namespace sme {

/// Midpoint velocity nodes c_j = -c_max + (j + 1/2) dc on [-c_max, c_max].
struct VelocityGrid {
    double c_max = 10.0;
    int num = 400;
    double dc = 0.05;
    std::vector<double> c;
};

VelocityGrid make_velocity_grid(double c_max, int num);

struct KineticMoments {
    double rho = 0.0;
    double v = 0.0;
    double theta = 0.0;
    double p = 0.0;
    double q_bar = 0.0;
};

/// Midpoint-rule moments; q_bar = int (c - v)^3 f dc / (rho theta^{3/2}).
KineticMoments discrete_moments(const VelocityGrid& vel, std::span<const double> f);

/// Samples the Maxwellian rho / sqrt(2 pi theta) exp(-(c - v)^2 / (2 theta)) on
/// the nodes. Uses a multiplicative recurrence from the node nearest v outward,
/// so only four exponentials are needed per call.
void discrete_maxwellian(const VelocityGrid& vel, double rho, double v, double theta, std::span<double> out);

/// Discrete Maxwellian whose midpoint moments reproduce (rho, v, theta) to
/// round-off. The parameters are corrected by a short fixed-point iteration,
/// which keeps the BGK operator conservative on a truncated velocity grid.
void conservative_maxwellian(const VelocityGrid& vel, double rho, double v, double theta, std::span<double> out);

struct DVMState {
    Mesh1D mesh;
    VelocityGrid vel;
    std::vector<double> f;  // cell-major, num_cells x vel.num
    double time = 0.0;

    std::span<double> cell(int i) { return {f.data() + static_cast<std::size_t>(i) * vel.num, static_cast<std::size_t>(vel.num)}; }
    std::span<const double> cell(int i) const {
        return {f.data() + static_cast<std::size_t>(i) * vel.num, static_cast<std::size_t>(vel.num)};
    }
    KineticMoments moments(int i) const { return discrete_moments(vel, cell(i)); }
};

/// Maxwellian initial data with (rho, v, theta) from init(x); spline coefficients are ignored.
DVMState make_dvm_state(const Mesh1D& mesh, const VelocityGrid& vel, const std::function<MomentState(double)>& init);

/// First-order upwind transport per velocity plus explicit BGK relaxation toward
/// the Maxwellian of each cell's own discrete moments.
class DvmSolver {
public:
    explicit DvmSolver(RelaxationRule relax, Boundary boundary = Boundary::zero_gradient)
        : relax_(relax), boundary_(boundary) {}

    /// Boundary::fixed with Maxwellian ghost cells for the given states.
    DvmSolver(RelaxationRule relax, const MomentState& left_ghost, const MomentState& right_ghost)
        : relax_(relax), boundary_(Boundary::fixed), left_(left_ghost), right_(right_ghost) {}

    double stable_dt(const DVMState& s, double cfl) const;
    void step(DVMState& s, double dt);
    void advance(DVMState& s, double t_end, double dt);

    /// Number of negative distribution values seen in the last step (diagnostic only).
    long negative_count() const { return negatives_; }

private:
    RelaxationRule relax_;
    Boundary boundary_;
    MomentState left_, right_;
    std::vector<double> next_, maxw_, ghost_l_, ghost_r_;
    long negatives_ = 0;
};

void dvm_step(DVMState& s, RelaxationRule relax, double dt, Boundary boundary = Boundary::zero_gradient);

}  // namespace sme
