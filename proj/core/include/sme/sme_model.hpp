#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "sme/spline_basis.hpp"

namespace sme {

/// Unknowns of the moment system: (rho, v, theta, kappa_1..kappa_{n-3}).
struct MomentState {
    double rho = 1.0;
    double v = 0.0;
    double theta = 1.0;
    std::vector<double> kappa;

    int size() const { return 3 + static_cast<int>(kappa.size()); }
    bool physical() const { return rho > 0.0 && theta > 0.0; }

    Eigen::VectorXd to_vector() const;
    static MomentState from_vector(const Eigen::Ref<const Eigen::VectorXd>& u);

    /// Equilibrium state with m zero spline coefficients.
    static MomentState equilibrium(double rho, double v, double theta, int m);
};

/// Galerkin projections of the transformed BGK equation. Rows are test functions
/// {1, xi, xi^2, F_1..F_{n-3}}, columns the FCS trial functions; all with weight w.
///   M        <psi_i, w F_j>          V        <psi_i, w>
///   M_xi     <psi_i, xi w F_j>       V_xi     <psi_i, xi w>
///   M_dxi    <psi_i, (w F_j)'>       V_dxi    <psi_i, w'>
///   M_xidxi  <psi_i, xi (w F_j)'>    V_xidxi  <psi_i, xi w'>
///   M_xixidxi <psi_i, xi^2 (w F_j)'> V_xixidxi <psi_i, xi^2 w'>
struct ProjectionMatrices {
    ConstrainedSplineBasis basis;
    Eigen::MatrixXd M, M_xi, M_dxi, M_xidxi, M_xixidxi;
    Eigen::VectorXd V, V_xi, V_dxi, V_xidxi, V_xixidxi;
    /// c_j = int xi^3 w F_j, so that q_bar = c . kappa.
    Eigen::VectorXd heat_flux;

    int n() const { return static_cast<int>(M.rows()); }
    int count() const { return static_cast<int>(M.cols()); }
};

ProjectionMatrices assemble_projection(const ConstrainedSplineBasis& basis);

/// Quasi-linear form B u_t + A u_x = S, solved as u_t + A_sys u_x = B^{-1} S.
struct SystemMatrices {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd A_sys;
    MomentState state;
};

/// Dense assembly; A_sys from an LU solve of B X = A.
/// Throws Error(SingularB) when the condition estimate of B exceeds 1e13.
SystemMatrices assemble_system(const ProjectionMatrices& p, const MomentState& s);

/// A_sys(rho, v, theta, 0): kappa is dropped from every kappa-dependent block.
SystemMatrices linearized_system(const ProjectionMatrices& p, const MomentState& s);

/// BGK relaxation (0, 0, 0, -kappa/tau). tau = +inf gives zero; tau <= 0 throws.
std::vector<double> source(const MomentState& s, double tau);

/// f(c) = (rho / sqrt(theta)) w(xi) (1 + sum kappa_i F_i(xi)), xi = (c - v)/sqrt(theta).
double reconstruct(const MomentState& s, const ConstrainedSplineBasis& basis, double c);

struct MacroQuantities {
    double pressure = 0.0;
    double heat_flux = 0.0;
    double q_bar = 0.0;
};

MacroQuantities macro_quantities(const MomentState& s, const ProjectionMatrices& p);

/// Matrix-free A_sys(u) * du, exploiting that the first three rows of M, M_dxi
/// and M_xidxi vanish: B is block lower triangular with the constant lower-right
/// block M[3:, :], whose LU factorisation is computed once.
///
/// Holds scratch buffers, so one instance must not be shared between threads.
class QuasiLinearOperator {
public:
    explicit QuasiLinearOperator(std::shared_ptr<const ProjectionMatrices> p, bool linearized = false);

    int size() const { return n_; }
    bool linearized() const { return linearized_; }
    const ProjectionMatrices& projection() const { return *p_; }

    /// out = A_sys(u) du. u, du and out have length n. out may not alias du.
    void apply(std::span<const double> u, std::span<const double> du, std::span<double> out) const;

    /// Dense A_sys(u) through the same structured path (used for cross-checks).
    Eigen::MatrixXd matrix(std::span<const double> u) const;

private:
    std::shared_ptr<const ProjectionMatrices> p_;
    bool linearized_;
    int n_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lower_lu_;
    mutable Eigen::VectorXd kappa_, a0_, ax_, d_, xd_, xxd_, rhs_, tmp_;
};

/// Versioned text cache for projection matrices, keyed by
/// (xi_min, xi_max, n, k, quadrature order).
struct ProjectionKey {
    double xi_min = -4.0;
    double xi_max = 4.0;
    int n = 13;
    int k = 1;

    auto tie() const { return std::tie(xi_min, xi_max, n, k); }
    bool operator<(const ProjectionKey& o) const { return tie() < o.tie(); }
    std::string file_name() const;
};

void save_projection(const ProjectionMatrices& p, const std::filesystem::path& path);

/// Throws Error(CacheFormat) on version, key or shape mismatch.
ProjectionMatrices load_projection(const std::filesystem::path& path, const ProjectionKey& expected);

/// Builds each projection at most once per process; with a directory set, also
/// reads and writes cache files there. Thread-safe.
class ProjectionCache {
public:
    explicit ProjectionCache(std::filesystem::path dir = {}) : dir_(std::move(dir)) {}

    std::shared_ptr<const ProjectionMatrices> get(const ProjectionKey& key);

    static ProjectionCache& global();

private:
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::map<ProjectionKey, std::shared_ptr<const ProjectionMatrices>> entries_;
};

}  // namespace sme
