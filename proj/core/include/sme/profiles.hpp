#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "sme/dvm.hpp"
#include "sme/kinetic_solvers.hpp"

namespace sme {

/// Macroscopic profiles on cell centers.
struct Profiles {
    std::vector<double> x, rho, v, theta, p, q_bar;

    std::size_t size() const { return x.size(); }
};

Profiles sme_profiles(const FieldState& f, const ProjectionMatrices& p);
Profiles dvm_profiles(const DVMState& s);

/// Header x,rho,v,theta,p,q_bar; one row per cell; 17 significant digits.
void write_profiles_csv(const Profiles& prof, std::ostream& os);
Profiles read_profiles_csv(std::istream& is);

/// Profile resampled at new abscissae by linear interpolation (constant extension).
Profiles interpolate(const Profiles& prof, const std::vector<double>& x);

struct ErrorNorm {
    double value = 0.0;
    bool absolute = false;  // reference integral below 1e-14: value is the absolute integral
};

/// int |q - q_ref| dx / int |q_ref| dx by the trapezoid rule on the given abscissae.
ErrorNorm relative_l1(const std::vector<double>& x, const std::vector<double>& q, const std::vector<double>& q_ref);

struct ErrorSet {
    ErrorNorm rho, v, p, q_bar;
};

/// Relative L1 errors of sol against ref; ref is interpolated onto sol's cells when the abscissae differ.
ErrorSet error_norms(const Profiles& sol, const Profiles& ref);

/// First x where the linear interpolant of y crosses level; throws NoCrossing otherwise.
double level_crossing(const std::vector<double>& x, const std::vector<double>& y, double level);

struct AlignedProfiles {
    Profiles profiles;  // rho replaced by (rho - rho_L) / (rho_R - rho_L), x shifted
    double shift = 0.0;
};

/// Rescales density to [0, 1] and shifts x so the 1/2 crossing sits at x = 0.
AlignedProfiles shock_align_and_rescale(const Profiles& prof, double rho_left, double rho_right);

struct SteadyStateResult {
    double time = 0.0;
    long steps = 0;
    double residual = 0.0;  // max |d rho| / dt of the last step
    bool converged = false;
};

/// Marches until max_i |rho_i^{new} - rho_i| / dt < tol or t_max is reached
/// (Error(NoSteadyState) in that case, unless strict is false: then the state
/// at t_max is returned with converged = false).
SteadyStateResult march_to_steady(SmeSolver& solver, FieldState& f, double dt, double tol = 1e-8, double t_max = 500.0,
                                  bool strict = true);
SteadyStateResult march_to_steady(DvmSolver& solver, DVMState& s, double dt, double tol = 1e-8, double t_max = 500.0,
                                  bool strict = true);

}  // namespace sme
