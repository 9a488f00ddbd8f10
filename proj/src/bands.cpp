#include "fsw/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsw {

namespace {

constexpr double merge_tol = 1e-10;
constexpr long max_scan_nodes = 1L << 22;

struct BranchExtrema {
    std::vector<double> lo, hi;
    std::vector<Eigen::VectorXd> arg_lo, arg_hi;
};

BranchExtrema scan_branches(const MatrixSymbol& u, const TorusGrid& grid) {
    const int n = u.n;
    BranchExtrema ext;
    ext.lo.assign(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    ext.hi.assign(static_cast<size_t>(n), -std::numeric_limits<double>::infinity());
    ext.arg_lo.resize(static_cast<size_t>(n));
    ext.arg_hi.resize(static_cast<size_t>(n));

    const std::int64_t total = grid.node_count();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        Eigen::VectorXd x = grid.node(flat);
        Eigen::VectorXd lam = symbol_eigenvalues(u, x);
        for (int j = 0; j < n; ++j) {
            if (lam[j] < ext.lo[static_cast<size_t>(j)]) {
                ext.lo[static_cast<size_t>(j)] = lam[j];
                ext.arg_lo[static_cast<size_t>(j)] = x;
            }
            if (lam[j] > ext.hi[static_cast<size_t>(j)]) {
                ext.hi[static_cast<size_t>(j)] = lam[j];
                ext.arg_hi[static_cast<size_t>(j)] = x;
            }
        }
    }
    return ext;
}

double branch_value(const MatrixSymbol& u, int branch, const Eigen::VectorXd& x) {
    return symbol_eigenvalues(u, x)[branch];
}

std::vector<Band> merge_ranges(std::vector<Band> ranges) {
    std::sort(ranges.begin(), ranges.end(),
              [](const Band& a, const Band& b) { return a.lo < b.lo; });
    std::vector<Band> merged;
    for (const Band& r : ranges) {
        if (!merged.empty() && r.lo <= merged.back().hi + merge_tol)
            merged.back().hi = std::max(merged.back().hi, r.hi);
        else
            merged.push_back(r);
    }
    return merged;
}

} // namespace

double BandSet::distance(double z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Band& b : bands) {
        double d = 0.0;
        if (z < b.lo)
            d = b.lo - z;
        else if (z > b.hi)
            d = z - b.hi;
        best = std::min(best, d);
    }
    return best;
}

int BandSet::gap_index(double z) const {
    int below = 0;
    for (const Band& b : bands)
        if (b.hi < z) ++below;
    return below;
}

double delta(const MatrixSymbol& u, const Eigen::VectorXd& x, double z, double herm_tol) {
    Eigen::MatrixXcd m = u.eval(x);
    double dev = hermitian_deviation(m);
    if (dev > herm_tol)
        throw std::runtime_error("symbol '" + u.name + "' deviates from Hermitian by " +
                                 std::to_string(dev));
    m.diagonal().array() -= z;
    std::complex<double> det = m.determinant();
    if (std::abs(det.imag()) > 1e-10)
        throw std::runtime_error("determinant has non-real residue " +
                                 std::to_string(det.imag()));
    return det.real();
}

ScalarField phi_z(const MatrixSymbol& u, double z) {
    return [u, z](const Eigen::VectorXd& x) { return delta(u, x, z); };
}

BandSet compute_bands(const MatrixSymbol& u, const TorusGrid& grid, int refine_limit,
                      double endpoint_tol) {
    if (u.nu != grid.nu)
        throw std::invalid_argument("symbol dimension does not match grid");
    const int n = u.n;

    // Accumulated endpoints only widen: grids are nested under doubling, so
    // each round's raw scan already dominates the previous one; the explicit
    // min/max keeps the polished values monotone as well.
    std::vector<double> lo(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<size_t>(n), -std::numeric_limits<double>::infinity());

    BandSet result;
    int points = grid.points_per_dim;
    bool converged = false;
    double drift = std::numeric_limits<double>::infinity();

    for (int round = 0; round <= refine_limit; ++round) {
        TorusGrid round_grid = make_grid(grid.nu, points);
        if (round_grid.node_count() > max_scan_nodes) {
            if (round == 0)
                throw std::invalid_argument("initial band scan grid exceeds the node cap");
            break;
        }

        BranchExtrema ext = scan_branches(u, round_grid);
        double h = round_grid.spacing();
        double round_drift = 0.0;
        for (int j = 0; j < n; ++j) {
            auto f = [&u, j](const Eigen::VectorXd& x) { return branch_value(u, j, x); };
            Eigen::VectorXd x_lo =
                polish_minimum(f, ext.arg_lo[static_cast<size_t>(j)], h);
            double new_lo = std::min(ext.lo[static_cast<size_t>(j)], f(x_lo));
            auto neg = [&f](const Eigen::VectorXd& x) { return -f(x); };
            Eigen::VectorXd x_hi =
                polish_minimum(neg, ext.arg_hi[static_cast<size_t>(j)], h);
            double new_hi = std::max(ext.hi[static_cast<size_t>(j)], f(x_hi));

            size_t sj = static_cast<size_t>(j);
            double prev_lo = lo[sj], prev_hi = hi[sj];
            lo[sj] = std::min(lo[sj], new_lo);
            hi[sj] = std::max(hi[sj], new_hi);
            if (round > 0)
                round_drift = std::max({round_drift, prev_lo - lo[sj], hi[sj] - prev_hi});
        }

        result.resolution = points;
        if (round > 0) {
            drift = round_drift;
            if (drift < endpoint_tol) {
                converged = true;
                break;
            }
        }
        points *= 2;
    }

    result.refinement_converged = converged;
    result.endpoint_drift = std::isfinite(drift) ? drift : 0.0;

    result.branch_ranges.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        result.branch_ranges.push_back({lo[static_cast<size_t>(j)], hi[static_cast<size_t>(j)]});
    result.bands = merge_ranges(result.branch_ranges);
    for (const Band& b : result.bands) {
        result.gamma.push_back(b.lo);
        result.gamma.push_back(b.hi);
    }
    std::sort(result.gamma.begin(), result.gamma.end());
    return result;
}

GammaPoints gamma_points(const BandSet& bands) {
    GammaPoints out;
    for (double g : bands.gamma) {
        if (!out.values.empty() && g - out.values.back() <= merge_tol) {
            ++out.collapsed;
            continue;
        }
        out.values.push_back(g);
    }
    return out;
}

ExtremalVerdict verify_global_extremal(const MatrixSymbol& u, double z,
                                       const TorusGrid& grid, double tol) {
    ExtremalVerdict verdict;
    verdict.min_value = std::numeric_limits<double>::infinity();
    verdict.max_value = -std::numeric_limits<double>::infinity();
    const std::int64_t total = grid.node_count();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        double v = delta(u, grid.node(flat), z);
        verdict.min_value = std::min(verdict.min_value, v);
        verdict.max_value = std::max(verdict.max_value, v);
    }
    bool attained_from_above = verdict.min_value >= -tol && verdict.min_value <= tol;
    bool attained_from_below = verdict.max_value <= tol && verdict.max_value >= -tol;
    verdict.globally_extremal = attained_from_above || attained_from_below;
    return verdict;
}

} // namespace fsw
