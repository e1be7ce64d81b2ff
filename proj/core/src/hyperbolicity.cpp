#include "sme/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sme/error.hpp"

namespace sme {

SpectrumReport spectrum_of(const Eigen::MatrixXd& a_sys, double rel_tol) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a_sys, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::EigensolverFailure, "eigensolver did not converge");
    SpectrumReport r;
    const auto& ev = es.eigenvalues();
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](auto a, auto b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    for (const auto& z : r.eigenvalues) {
        r.max_imag = std::max(r.max_imag, std::abs(z.imag()));
        r.spectral_radius = std::max(r.spectral_radius, std::abs(z));
    }
    r.tolerance = rel_tol * std::max(1.0, r.spectral_radius);
    r.hyperbolic = r.max_imag < r.tolerance;
    return r;
}

SpectrumReport spectrum(const ProjectionMatrices& p, const MomentState& s, double rel_tol, bool linearized) {
    const SystemMatrices sys = linearized ? linearized_system(p, s) : assemble_system(p, s);
    SpectrumReport r = spectrum_of(sys.A_sys, rel_tol);
    r.state = s;
    return r;
}

double DomainScan::area_fraction() const {
    if (hyperbolic.empty()) return 0.0;
    const auto count = std::count(hyperbolic.begin(), hyperbolic.end(), std::uint8_t{1});
    return static_cast<double>(count) / static_cast<double>(hyperbolic.size());
}

BoundingBox DomainScan::bounding_box() const {
    BoundingBox box;
    for (int a = 0; a < axis_i.resolution; ++a) {
        for (int b = 0; b < axis_j.resolution; ++b) {
            if (!at(a, b)) continue;
            const double x = axis_i.value(a);
            const double y = axis_j.value(b);
            if (box.empty) {
                box = {x, x, y, y, false};
            } else {
                box.lo_i = std::min(box.lo_i, x);
                box.hi_i = std::max(box.hi_i, x);
                box.lo_j = std::min(box.lo_j, y);
                box.hi_j = std::max(box.hi_j, y);
            }
        }
    }
    return box;
}

std::pair<int, int> center_indices(int m) {
    if (m < 2) fail(ErrorKind::InvalidArgument, "center_indices: need at least two spline coefficients");
    const int i = (m - 1) / 2;
    return {i, i + 1};
}

DomainScan scan_domain(const ProjectionMatrices& p, const MomentState& base, int i, int j, ScanAxis axis_i,
                       ScanAxis axis_j, bool linearized, double rel_tol) {
    const int m = p.count();
    if (i == j || i < 0 || j < 0 || i >= m || j >= m) {
        fail(ErrorKind::InvalidArgument, "scan_domain: need two distinct valid coefficient indices");
    }
    if (axis_i.resolution < 1 || axis_j.resolution < 1) fail(ErrorKind::InvalidArgument, "scan_domain: empty axis");
    DomainScan scan{i, j, axis_i, axis_j, base, linearized, {}, {}};
    const std::size_t total = static_cast<std::size_t>(axis_i.resolution) * axis_j.resolution;
    scan.hyperbolic.resize(total);
    scan.max_imag.resize(total);
    MomentState s = base;
    for (int a = 0; a < axis_i.resolution; ++a) {
        for (int b = 0; b < axis_j.resolution; ++b) {
            s.kappa[i] = axis_i.value(a);
            s.kappa[j] = axis_j.value(b);
            const std::size_t idx = static_cast<std::size_t>(a) * axis_j.resolution + b;
            try {
                const SpectrumReport r = spectrum(p, s, rel_tol, linearized);
                scan.hyperbolic[idx] = r.hyperbolic ? 1 : 0;
                scan.max_imag[idx] = r.max_imag;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::SingularB) throw;
                scan.hyperbolic[idx] = 0;
                scan.max_imag[idx] = std::numeric_limits<double>::infinity();
            }
        }
    }
    return scan;
}

std::optional<double> first_loss_along_ray(const ProjectionMatrices& p, const MomentState& base,
                                           const std::vector<double>& direction, double s_max, double step) {
    if (direction.size() != base.kappa.size() || !(step > 0.0)) {
        fail(ErrorKind::InvalidArgument, "first_loss_along_ray: bad direction or step");
    }
    MomentState s = base;
    for (int k = 1; k * step <= s_max + 1e-12; ++k) {
        const double t = k * step;
        for (std::size_t c = 0; c < direction.size(); ++c) s.kappa[c] = base.kappa[c] + t * direction[c];
        try {
            if (!spectrum(p, s).hyperbolic) return t;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularB) throw;
            return t;
        }
    }
    return std::nullopt;
}

void write_scan_csv(const DomainScan& scan, std::ostream& os) {
    os << "kappa_i,kappa_j,hyperbolic,max_imag\n";
    char buf[128];
    for (int a = 0; a < scan.axis_i.resolution; ++a) {
        for (int b = 0; b < scan.axis_j.resolution; ++b) {
            const std::size_t idx = static_cast<std::size_t>(a) * scan.axis_j.resolution + b;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", scan.axis_i.value(a), scan.axis_j.value(b),
                          static_cast<int>(scan.hyperbolic[idx]), scan.max_imag[idx]);
            os << buf;
        }
    }
}

}  // namespace sme
