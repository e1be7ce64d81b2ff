#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sme/sme_model.hpp"

namespace sme {

struct Mesh1D {
    double x_left = 0.0;
    double x_right = 1.0;
    int num_cells = 1;

    double dx() const { return (x_right - x_left) / num_cells; }
    double center(int i) const { return x_left + (i + 0.5) * dx(); }
    std::vector<double> centers() const;
};

/// Throws InvalidArgument unless x_left < x_right and num_cells >= 1.
Mesh1D make_mesh(double x_left, double x_right, int num_cells);

/// zero_gradient copies the edge cell into the ghost; fixed holds prescribed
/// ghost states (inflow/outflow of a stationary problem).
enum class Boundary { zero_gradient, periodic, fixed };

/// Variables in which the straight-line path between neighbouring states is taken.
/// conservative uses (rho, rho v, rho v^2 + rho theta, kappa), for which the mass
/// and momentum fluxes are linear and their jumps are therefore exact.
enum class PathVariables { primitive, conservative };

/// Relaxation time of the BGK operator.
struct RelaxationRule {
    enum class Kind { kn_over_rho, constant, collisionless };
    Kind kind = Kind::collisionless;
    double value = 0.0;

    static RelaxationRule kn_over_rho(double kn) { return {Kind::kn_over_rho, kn}; }
    static RelaxationRule constant(double tau) { return {Kind::constant, tau}; }
    static RelaxationRule collisionless() { return {Kind::collisionless, 0.0}; }

    /// +inf for the collisionless rule and for an infinite Knudsen number.
    double tau(double rho) const;
};

/// Moment unknowns for every cell, stored cell-major in one flat array.
struct FieldState {
    Mesh1D mesh;
    int num_vars = 0;
    std::vector<double> u;
    double time = 0.0;

    std::span<double> cell(int i) { return {u.data() + static_cast<std::size_t>(i) * num_vars, static_cast<std::size_t>(num_vars)}; }
    std::span<const double> cell(int i) const {
        return {u.data() + static_cast<std::size_t>(i) * num_vars, static_cast<std::size_t>(num_vars)};
    }
    MomentState state(int i) const;
    void set_state(int i, const MomentState& s);
};

/// Samples an initial condition at cell centers.
FieldState make_field(const Mesh1D& mesh, int num_vars, const std::function<MomentState(double)>& init);

struct SmeSolverOptions {
    bool linearized = false;
    Boundary boundary = Boundary::zero_gradient;
    PathVariables path = PathVariables::conservative;
    MomentState left_ghost;  // used with Boundary::fixed
    MomentState right_ghost;
    bool exact_speed = false;  // eigendecomposition per state instead of the equilibrium bound
    double safety = 1.2;
};

/// First-order path-conservative finite volumes for u_t + A_sys(u) u_x = S(u).
/// Interface fluctuations use the straight-line path with the system matrix
/// evaluated at the arithmetic mean of the neighbours plus local Lax-Friedrichs
/// dissipation:
///   D^-+ = 1/2 A(w_mean) (w_R - w_L) -+ 1/2 alpha (w_R - w_L),
/// with w the path variables and A = J A_sys J^{-1} in conservative mode. In that
/// mode the energy row of the path integral is evaluated exactly as the jump of
/// the energy flux, so mass, momentum and energy are conserved to round-off.
class SmeSolver {
public:
    SmeSolver(std::shared_ptr<const ProjectionMatrices> p, RelaxationRule relax, SmeSolverOptions opts = {});

    const ProjectionMatrices& projection() const { return op_.projection(); }
    const SmeSolverOptions& options() const { return opts_; }
    const RelaxationRule& relaxation() const { return relax_; }

    /// max |lambda(A_sys(1, 0, 1, 0))|.
    double equilibrium_speed() const { return c_eq_; }

    /// |v| + safety * C * sqrt(theta), or the exact spectral radius in exact_speed mode.
    double spectral_radius_estimate(std::span<const double> u) const;
    double spectral_radius_estimate(const MomentState& s) const;

    /// cfl * dx / max speed, further limited to 0.9 tau_min.
    double stable_dt(const FieldState& f, double cfl) const;

    /// One forward Euler step in place. Throws StiffSource if dt > 0.9 tau_min,
    /// UnphysicalState or NanDetected on breakdown.
    void step(FieldState& f, double dt);

    /// Steps with fixed dt (the last step is shortened to hit t_end exactly).
    void advance(FieldState& f, double t_end, double dt);

private:
    QuasiLinearOperator op_;
    RelaxationRule relax_;
    SmeSolverOptions opts_;
    double c_eq_ = 0.0;
    std::vector<double> next_, flux_, mean_, jump_, adu_, speed_, work_, ghost_l_, ghost_r_, wl_, wr_;

    double energy_flux(std::span<const double> u) const;
    void fluctuation(std::span<const double> ul, std::span<const double> ur, double alpha, double* fl, double* fr);
};

/// (rho, rho v, rho v^2 + rho theta, kappa) and back.
void to_conservative(std::span<const double> u, std::span<double> w);
void to_primitive(std::span<const double> w, std::span<double> u);

/// Free-function form of a single step.
void sme_step(FieldState& f, std::shared_ptr<const ProjectionMatrices> p, RelaxationRule relax, double dt,
              SmeSolverOptions opts = {});

}  // namespace sme
