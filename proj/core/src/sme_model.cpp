#include "sme/sme_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sme/error.hpp"

namespace sme {

Eigen::VectorXd MomentState::to_vector() const {
    Eigen::VectorXd u(size());
    u(0) = rho;
    u(1) = v;
    u(2) = theta;
    for (std::size_t i = 0; i < kappa.size(); ++i) u(3 + static_cast<Eigen::Index>(i)) = kappa[i];
    return u;
}

MomentState MomentState::from_vector(const Eigen::Ref<const Eigen::VectorXd>& u) {
    MomentState s;
    s.rho = u(0);
    s.v = u(1);
    s.theta = u(2);
    s.kappa.assign(u.data() + 3, u.data() + u.size());
    return s;
}

MomentState MomentState::equilibrium(double rho, double v, double theta, int m) {
    return {rho, v, theta, std::vector<double>(static_cast<std::size_t>(m), 0.0)};
}

ProjectionMatrices assemble_projection(const ConstrainedSplineBasis& basis) {
    const KnotGrid& grid = basis.grid();
    const int n = grid.n();
    const int m = basis.count();
    ProjectionMatrices p;
    p.basis = basis;
    for (auto* mat : {&p.M, &p.M_xi, &p.M_dxi, &p.M_xidxi, &p.M_xixidxi}) *mat = Eigen::MatrixXd::Zero(n, m);
    for (auto* vec : {&p.V, &p.V_xi, &p.V_dxi, &p.V_xidxi, &p.V_xixidxi}) *vec = Eigen::VectorXd::Zero(n);
    p.heat_flux = Eigen::VectorXd::Zero(m);

    const auto& rule = quad::gauss_legendre_rule();
    Eigen::VectorXd psi(n);
    for (int j = 0; j < m; ++j) {
        const auto pts = quadrature_breakpoints(grid, basis.support(j));
        for (std::size_t c = 0; c + 1 < pts.size(); ++c) {
            const double half = 0.5 * (pts[c + 1] - pts[c]);
            const double mid = 0.5 * (pts[c + 1] + pts[c]);
            for (int q = 0; q < quad::kGaussLegendreOrder; ++q) {
                const double xi = mid + half * rule.nodes[q];
                const double wq = half * rule.weights[q];
                const double w = gaussian_weight(xi);
                const double phi = basis.eval(j, xi);
                const double dwphi = w * (basis.derivative(j, xi) - xi * phi);
                psi(0) = 1.0;
                psi(1) = xi;
                psi(2) = xi * xi;
                for (int i = 0; i < m; ++i) psi(3 + i) = basis.eval(i, xi);
                p.M.col(j) += (wq * w * phi) * psi;
                p.M_xi.col(j) += (wq * xi * w * phi) * psi;
                p.M_dxi.col(j) += (wq * dwphi) * psi;
                p.M_xidxi.col(j) += (wq * xi * dwphi) * psi;
                p.M_xixidxi.col(j) += (wq * xi * xi * dwphi) * psi;
                p.heat_flux(j) += wq * xi * xi * xi * w * phi;
            }
        }
    }

    for (int i = 0; i < 3; ++i) {
        p.V(i) = gaussian_moment(i);
        p.V_xi(i) = gaussian_moment(i + 1);
        p.V_dxi(i) = -gaussian_moment(i + 1);
        p.V_xidxi(i) = -gaussian_moment(i + 2);
        p.V_xixidxi(i) = -gaussian_moment(i + 3);
    }
    for (int i = 0; i < m; ++i) {
        const auto f = [&](double xi) { return basis.eval(i, xi); };
        const Interval supp = basis.support(i);
        const double m0 = weighted_moment(grid, f, 0, supp);
        const double m1 = weighted_moment(grid, f, 1, supp);
        const double m2 = weighted_moment(grid, f, 2, supp);
        const double m3 = weighted_moment(grid, f, 3, supp);
        p.V(3 + i) = m0;
        p.V_xi(3 + i) = m1;
        p.V_dxi(3 + i) = -m1;
        p.V_xidxi(3 + i) = -m2;
        p.V_xixidxi(3 + i) = -m3;
    }
    return p;
}

namespace {

void check_state(const ProjectionMatrices& p, const MomentState& s, const char* where) {
    if (s.size() != p.n()) {
        fail(ErrorKind::InvalidArgument, std::string(where) + ": state has " + std::to_string(s.size()) +
                                             " unknowns, basis expects " + std::to_string(p.n()));
    }
    if (!s.physical()) {
        std::ostringstream msg;
        msg << where << ": unphysical state (rho = " << s.rho << ", theta = " << s.theta << ")";
        fail(ErrorKind::UnphysicalState, msg.str());
    }
}

SystemMatrices build_dense(const ProjectionMatrices& p, const MomentState& s, bool drop_kappa) {
    const int n = p.n();
    const int m = p.count();
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(m);
    if (!drop_kappa) {
        for (int i = 0; i < m; ++i) kappa(i) = s.kappa[i];
    }
    const double rho = s.rho;
    const double v = s.v;
    const double theta = s.theta;
    const double sq = std::sqrt(theta);

    const Eigen::VectorXd a0 = p.M * kappa + p.V;
    const Eigen::VectorXd ax = p.M_xi * kappa + p.V_xi;
    const Eigen::VectorXd d = p.M_dxi * kappa + p.V_dxi;
    const Eigen::VectorXd xd = p.M_xidxi * kappa + p.V_xidxi;
    const Eigen::VectorXd xxd = p.M_xixidxi * kappa + p.V_xixidxi;

    SystemMatrices out;
    out.state = s;
    out.A.resize(n, n);
    out.B.resize(n, n);
    out.A.col(0) = (v * a0 + sq * ax) / rho;
    out.A.col(1) = -(v / sq) * d - xd;
    out.A.col(2) = -(v * (a0 + xd) + sq * (ax + xxd)) / (2.0 * theta);
    out.A.rightCols(m) = v * p.M + sq * p.M_xi;
    out.B.col(0) = a0 / rho;
    out.B.col(1) = -d / sq;
    out.B.col(2) = -(a0 + xd) / (2.0 * theta);
    out.B.rightCols(m) = p.M;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(out.B);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        std::ostringstream msg;
        msg << "B is numerically singular (condition estimate " << (rcond > 0 ? 1.0 / rcond : INFINITY) << ")";
        fail(ErrorKind::SingularB, msg.str());
    }
    out.A_sys = lu.solve(out.A);
    return out;
}

}  // namespace

SystemMatrices assemble_system(const ProjectionMatrices& p, const MomentState& s) {
    check_state(p, s, "assemble_system");
    return build_dense(p, s, false);
}

SystemMatrices linearized_system(const ProjectionMatrices& p, const MomentState& s) {
    check_state(p, s, "linearized_system");
    return build_dense(p, s, true);
}

std::vector<double> source(const MomentState& s, double tau) {
    if (!(tau > 0.0)) fail(ErrorKind::InvalidArgument, "source: relaxation time must be positive");
    std::vector<double> out(static_cast<std::size_t>(s.size()), 0.0);
    if (std::isinf(tau)) return out;
    for (std::size_t i = 0; i < s.kappa.size(); ++i) out[3 + i] = -s.kappa[i] / tau;
    return out;
}

double reconstruct(const MomentState& s, const ConstrainedSplineBasis& basis, double c) {
    const double sq = std::sqrt(s.theta);
    const double xi = (c - s.v) / sq;
    double shape = 1.0;
    for (int i = 0; i < basis.count(); ++i) {
        if (s.kappa[i] != 0.0) shape += s.kappa[i] * basis.eval(i, xi);
    }
    return s.rho / sq * gaussian_weight(xi) * shape;
}

MacroQuantities macro_quantities(const MomentState& s, const ProjectionMatrices& p) {
    double second = 1.0;  // int xi^2 f~, exactly 1 for FCS up to quadrature
    double q_bar = 0.0;
    for (int i = 0; i < p.count(); ++i) {
        second += s.kappa[i] * p.M(2, i);
        q_bar += s.kappa[i] * p.heat_flux(i);
    }
    const double sq = std::sqrt(s.theta);
    return {s.rho * s.theta * second, s.rho * s.theta * sq * q_bar, q_bar};
}

QuasiLinearOperator::QuasiLinearOperator(std::shared_ptr<const ProjectionMatrices> p, bool linearized)
    : p_(std::move(p)), linearized_(linearized), n_(p_->n()) {
    const int m = p_->count();
    lower_lu_.compute(p_->M.bottomRows(m));
    if (!(lower_lu_.rcond() > 1e-13)) fail(ErrorKind::SingularB, "lower block of M is singular");
    for (auto* v : {&kappa_, &a0_, &ax_, &d_, &xd_, &xxd_, &rhs_, &tmp_}) v->resize(n_);
    kappa_.resize(m);
}

void QuasiLinearOperator::apply(std::span<const double> u, std::span<const double> du, std::span<double> out) const {
    const ProjectionMatrices& p = *p_;
    const int m = p.count();
    const double rho = u[0];
    const double v = u[1];
    const double theta = u[2];
    const double sq = std::sqrt(theta);

    if (linearized_) {
        a0_ = p.V;
        ax_ = p.V_xi;
        d_ = p.V_dxi;
        xd_ = p.V_xidxi;
        xxd_ = p.V_xixidxi;
    } else {
        kappa_ = Eigen::Map<const Eigen::VectorXd>(u.data() + 3, m);
        a0_.noalias() = p.M * kappa_;
        a0_ += p.V;
        ax_.noalias() = p.M_xi * kappa_;
        ax_ += p.V_xi;
        d_.noalias() = p.M_dxi * kappa_;
        d_ += p.V_dxi;
        xd_.noalias() = p.M_xidxi * kappa_;
        xd_ += p.V_xidxi;
        xxd_.noalias() = p.M_xixidxi * kappa_;
        xxd_ += p.V_xixidxi;
    }

    // rhs = A du
    const Eigen::Map<const Eigen::VectorXd> dk(du.data() + 3, m);
    const double c0 = du[0] / rho;
    const double c1 = du[1];
    const double c2 = du[2] / (2.0 * theta);
    rhs_ = c0 * (v * a0_ + sq * ax_) - c1 * ((v / sq) * d_ + xd_) - c2 * (v * (a0_ + xd_) + sq * (ax_ + xxd_));
    tmp_.noalias() = p.M * dk;
    rhs_ += v * tmp_;
    tmp_.noalias() = p.M_xi * dk;
    rhs_ += sq * tmp_;

    // B is block lower triangular: solve the 3x3 head, then the constant tail.
    Eigen::Matrix3d head;
    for (int i = 0; i < 3; ++i) {
        head(i, 0) = a0_(i) / rho;
        head(i, 1) = -d_(i) / sq;
        head(i, 2) = -(a0_(i) + xd_(i)) / (2.0 * theta);
    }
    const Eigen::Vector3d y = head.partialPivLu().solve(rhs_.head<3>());
    Eigen::Map<Eigen::VectorXd> res(out.data(), n_);
    res.head<3>() = y;
    tmp_.tail(m) = rhs_.tail(m) - (y(0) / rho) * a0_.tail(m) + (y(1) / sq) * d_.tail(m) +
                   (y(2) / (2.0 * theta)) * (a0_.tail(m) + xd_.tail(m));
    res.tail(m) = lower_lu_.solve(tmp_.tail(m));
}

Eigen::MatrixXd QuasiLinearOperator::matrix(std::span<const double> u) const {
    Eigen::MatrixXd out(n_, n_);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd col(n_);
    for (int c = 0; c < n_; ++c) {
        e(c) = 1.0;
        apply(u, {e.data(), static_cast<std::size_t>(n_)}, {col.data(), static_cast<std::size_t>(n_)});
        out.col(c) = col;
        e(c) = 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// cache

namespace {

constexpr int kCacheVersion = 1;
constexpr const char* kCacheMagic = "sme-projection";

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_matrix(std::ostream& os, const char* name, const Eigen::MatrixXd& a) {
    os << "matrix " << name << ' ' << a.rows() << ' ' << a.cols() << '\n';
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) os << (j ? " " : "") << fmt(a(i, j));
        os << '\n';
    }
}

void read_matrix(std::istream& is, const char* name, Eigen::MatrixXd& a, Eigen::Index rows, Eigen::Index cols) {
    std::string tag, got;
    Eigen::Index r = 0, c = 0;
    if (!(is >> tag >> got >> r >> c) || tag != "matrix" || got != name || r != rows || c != cols) {
        fail(ErrorKind::CacheFormat, std::string("projection cache: bad header for ") + name);
    }
    a.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(is >> a(i, j))) fail(ErrorKind::CacheFormat, std::string("projection cache: truncated ") + name);
}

}  // namespace

std::string ProjectionKey::file_name() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "projection_%.6g_%.6g_n%d_k%d_q%d.txt", xi_min, xi_max, n, k,
                  quad::kGaussLegendreOrder);
    return buf;
}

void save_projection(const ProjectionMatrices& p, const std::filesystem::path& path) {
    const KnotGrid& g = p.basis.grid();
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) fail(ErrorKind::CacheFormat, "cannot write " + tmp);
        os << kCacheMagic << ' ' << kCacheVersion << '\n';
        os << "key " << fmt(g.xi_min()) << ' ' << fmt(g.xi_max()) << ' ' << g.n() << ' ' << g.k() << ' '
           << quad::kGaussLegendreOrder << '\n';
        os << "fcs " << p.basis.count() << '\n';
        for (const auto& a : p.basis.all_coefficients())
            os << fmt(a[0]) << ' ' << fmt(a[1]) << ' ' << fmt(a[2]) << ' ' << fmt(a[3]) << '\n';
        write_matrix(os, "M", p.M);
        write_matrix(os, "M_xi", p.M_xi);
        write_matrix(os, "M_dxi", p.M_dxi);
        write_matrix(os, "M_xidxi", p.M_xidxi);
        write_matrix(os, "M_xixidxi", p.M_xixidxi);
        Eigen::MatrixXd vs(p.n(), 5);
        vs << p.V, p.V_xi, p.V_dxi, p.V_xidxi, p.V_xixidxi;
        write_matrix(os, "V", vs);
        write_matrix(os, "heat_flux", p.heat_flux);
        if (!os) fail(ErrorKind::CacheFormat, "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

ProjectionMatrices load_projection(const std::filesystem::path& path, const ProjectionKey& expected) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::CacheFormat, "cannot open " + path.string());
    std::string magic, tag;
    int version = 0;
    if (!(is >> magic >> version) || magic != kCacheMagic || version != kCacheVersion) {
        fail(ErrorKind::CacheFormat, "projection cache: unsupported format in " + path.string());
    }
    double xi_min = 0, xi_max = 0;
    int n = 0, k = 0, qorder = 0;
    if (!(is >> tag >> xi_min >> xi_max >> n >> k >> qorder) || tag != "key") {
        fail(ErrorKind::CacheFormat, "projection cache: missing key");
    }
    if (xi_min != expected.xi_min || xi_max != expected.xi_max || n != expected.n || k != expected.k ||
        qorder != quad::kGaussLegendreOrder) {
        fail(ErrorKind::CacheFormat, "projection cache: key mismatch in " + path.string());
    }
    int count = 0;
    if (!(is >> tag >> count) || tag != "fcs" || count != n - 3) fail(ErrorKind::CacheFormat, "projection cache: bad fcs block");
    std::vector<std::array<double, 4>> coeffs(static_cast<std::size_t>(count));
    for (auto& a : coeffs)
        if (!(is >> a[0] >> a[1] >> a[2] >> a[3])) fail(ErrorKind::CacheFormat, "projection cache: truncated fcs");

    ProjectionMatrices p;
    p.basis = ConstrainedSplineBasis(build_grid(xi_min, xi_max, n, k), std::move(coeffs));
    read_matrix(is, "M", p.M, n, count);
    read_matrix(is, "M_xi", p.M_xi, n, count);
    read_matrix(is, "M_dxi", p.M_dxi, n, count);
    read_matrix(is, "M_xidxi", p.M_xidxi, n, count);
    read_matrix(is, "M_xixidxi", p.M_xixidxi, n, count);
    Eigen::MatrixXd vs, hf;
    read_matrix(is, "V", vs, n, 5);
    read_matrix(is, "heat_flux", hf, count, 1);
    p.V = vs.col(0);
    p.V_xi = vs.col(1);
    p.V_dxi = vs.col(2);
    p.V_xidxi = vs.col(3);
    p.V_xixidxi = vs.col(4);
    p.heat_flux = hf.col(0);
    return p;
}

std::shared_ptr<const ProjectionMatrices> ProjectionCache::get(const ProjectionKey& key) {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;

    std::shared_ptr<const ProjectionMatrices> p;
    const auto file = dir_.empty() ? std::filesystem::path{} : dir_ / key.file_name();
    if (!file.empty() && std::filesystem::exists(file)) {
        try {
            p = std::make_shared<const ProjectionMatrices>(load_projection(file, key));
        } catch (const Error&) {
            p = nullptr;  // stale or foreign file, rebuild below
        }
    }
    if (!p) {
        p = std::make_shared<const ProjectionMatrices>(
            assemble_projection(build_fcs(build_grid(key.xi_min, key.xi_max, key.n, key.k))));
        if (!file.empty()) {
            std::filesystem::create_directories(dir_);
            save_projection(*p, file);
        }
    }
    entries_.emplace(key, p);
    return p;
}

ProjectionCache& ProjectionCache::global() {
    static ProjectionCache cache;
    return cache;
}

}  // namespace sme
