#include "fsw/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "fsw/torus.hpp"

namespace fsw {

double golden_section_min(const Scalar1D& f, double a, double b, int iterations) {
    if (!(a < b)) throw std::invalid_argument("golden_section_min: empty bracket");
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iterations && (b - a) > 1e-14; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300)
        throw std::invalid_argument("fit_line: abscissae are degenerate");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

double bisect_root(const Scalar1D& f, double lo, double hi, double xtol,
                   int max_iterations) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::invalid_argument("bisect_root: no sign change on bracket");
    for (int it = 0; it < max_iterations && (hi - lo) > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd polish_minimum(const ScalarField& f, Eigen::VectorXd x0,
                               double radius, int sweeps) {
    const int nu = static_cast<int>(x0.size());
    for (int s = 0; s < sweeps; ++s) {
        for (int axis = 0; axis < nu; ++axis) {
            Eigen::VectorXd probe = x0;
            auto line = [&](double t) {
                probe[axis] = wrap_angle(t);
                return f(probe);
            };
            const double c = x0[axis];
            x0[axis] = wrap_angle(golden_section_min(line, c - radius, c + radius));
        }
        radius *= 0.25; // each sweep tightens the bracket around the new center
    }
    return x0;
}

std::vector<Eigen::VectorXd> sphere_directions(int nu, int count) {
    std::vector<Eigen::VectorXd> dirs;
    if (nu == 1) {
        dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
        dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
        return dirs;
    }
    // coordinate axes first so axis-aligned degeneracies are always probed
    for (int a = 0; a < nu; ++a) {
        for (double sgn : {1.0, -1.0}) {
            Eigen::VectorXd d = Eigen::VectorXd::Zero(nu);
            d[a] = sgn;
            dirs.push_back(d);
        }
    }
    const int extra = std::max(0, count - static_cast<int>(dirs.size()));
    if (nu == 2) {
        for (int k = 0; k < extra; ++k) {
            const double theta = two_pi * (k + 0.5) / extra;
            Eigen::VectorXd d(2);
            d << std::cos(theta), std::sin(theta);
            dirs.push_back(d);
        }
    } else if (nu == 3) {
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int k = 0; k < extra; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / extra;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double theta = two_pi * k / golden;
            Eigen::VectorXd d(3);
            d << r * std::cos(theta), r * std::sin(theta), z;
            dirs.push_back(d);
        }
    } else {
        throw std::invalid_argument("sphere_directions: dimension above 3 not supported");
    }
    return dirs;
}

} // namespace fsw
