#include "fsw/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace fsw {

namespace {

std::vector<Eigen::VectorXd> grid_nodes(const TorusGrid& grid) {
    std::vector<Eigen::VectorXd> nodes(static_cast<size_t>(grid.node_count()));
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
        nodes[static_cast<size_t>(i)] = grid.node(i);
    return nodes;
}

// w * K as a dense matrix over grid nodes (the quadrature-scaled kernel part)
Eigen::MatrixXcd kernel_matrix(const KernelSymbol& k, const std::vector<Eigen::VectorXd>& nodes,
                               double weight) {
    const int n = k.n;
    const std::int64_t m = static_cast<std::int64_t>(nodes.size());
    Eigen::MatrixXcd out(n * m, n * m);

    if (k.separable) {
        const auto& terms = *k.separable;
        const int r = static_cast<int>(terms.size());
        Eigen::MatrixXcd v(n * m, r);
        Eigen::VectorXd c(r);
        for (int t = 0; t < r; ++t) {
            c[t] = terms[static_cast<size_t>(t)].coupling;
            for (std::int64_t i = 0; i < m; ++i)
                v.block(n * i, t, n, 1) =
                    terms[static_cast<size_t>(t)].factor(nodes[static_cast<size_t>(i)]);
        }
        out.noalias() = weight * (v * c.asDiagonal() * v.adjoint());
        return out;
    }

    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < i; ++j) {
            Eigen::MatrixXcd block =
                weight * k.eval(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]);
            out.block(n * i, n * j, n, n) = block;
            out.block(n * j, n * i, n, n) = block.adjoint();
        }
        Eigen::MatrixXcd diag =
            weight * k.eval(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(i)]);
        out.block(n * i, n * i, n, n) = 0.5 * (diag + diag.adjoint());
    }
    return out;
}

} // namespace

DiscretizedOperator assemble(const MatrixSymbol& u, const KernelSymbol& k,
                             const TorusGrid& grid, const AssembleOptions& options) {
    if (u.nu != grid.nu || k.nu != grid.nu)
        throw std::invalid_argument("symbol dimension does not match grid");
    if (u.n != k.n)
        throw std::invalid_argument("U and K block sizes differ");

    const std::int64_t size = static_cast<std::int64_t>(u.n) * grid.node_count();
    if (size > options.max_size)
        throw ResourceCapError("discretized matrix dimension " + std::to_string(size) +
                               " exceeds the cap " + std::to_string(options.max_size));

    std::vector<Eigen::VectorXd> nodes = grid_nodes(grid);
    DiscretizedOperator op;
    op.grid = grid;
    op.n = u.n;
    op.matrix = kernel_matrix(k, nodes, grid.weight());

    const int n = u.n;
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        Eigen::MatrixXcd ui = u.eval(nodes[static_cast<size_t>(i)]);
        op.matrix.block(n * i, n * i, n, n) += 0.5 * (ui + ui.adjoint());
    }

    double peak = op.matrix.cwiseAbs().maxCoeff();
    op.herm_residue =
        (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() / std::max(1.0, peak);
    op.real_valued = op.matrix.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, peak);
    return op;
}

Eigen::VectorXd hermitian_eigenvalues(const DiscretizedOperator& op) {
    if (op.real_valued) {
        Eigen::MatrixXd real = op.matrix.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(real, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.matrix, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

SpectralResult eig_outside(const Eigen::VectorXd& eigenvalues, const BandSet& bands,
                           double margin) {
    if (margin <= 0.0) throw std::invalid_argument("margin must be positive");
    SpectralResult result;
    result.margin = margin;
    result.counts_per_gap.assign(bands.bands.size() + 1, 0);
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        double z = eigenvalues[i];
        if (bands.distance(z) <= margin) continue;
        int gap = bands.gap_index(z);
        result.eigenvalues_outside.push_back(z);
        result.gap_labels.push_back(gap);
        ++result.counts_per_gap[static_cast<size_t>(gap)];
    }
    return result;
}

SpectralResult eig_outside(const DiscretizedOperator& op, const BandSet& bands,
                           double margin) {
    return eig_outside(hermitian_eigenvalues(op), bands, margin);
}

StabilityReport refine_count(const MatrixSymbol& u,
                             const std::function<KernelSymbol(int)>& kernel_at,
                             const BandSet& bands, const std::vector<int>& resolutions,
                             double margin, const AssembleOptions& options) {
    if (resolutions.size() < 3)
        throw std::invalid_argument("refine_count needs at least 3 resolutions");
    if (!std::is_sorted(resolutions.begin(), resolutions.end()) ||
        std::adjacent_find(resolutions.begin(), resolutions.end()) != resolutions.end())
        throw std::invalid_argument("resolutions must be strictly increasing");

    StabilityReport report;
    report.resolutions = resolutions;
    for (int res : resolutions) {
        TorusGrid grid = make_grid(u.nu, res);
        DiscretizedOperator op = assemble(u, kernel_at(res), grid, options);
        SpectralResult spectral = eig_outside(op, bands, margin);
        report.counts.push_back(spectral.counts_per_gap);
        report.outside.push_back(spectral.eigenvalues_outside);
    }

    const auto& last = report.outside.back();
    const auto& prev = report.outside[report.outside.size() - 2];
    bool counts_agree = report.counts.back() == report.counts[report.counts.size() - 2];
    double drift = std::numeric_limits<double>::infinity();
    if (counts_agree) {
        drift = 0.0;
        for (size_t i = 0; i < last.size(); ++i)
            drift = std::max(drift, std::abs(last[i] - prev[i]));
    }
    report.last_drift = drift;

    if (counts_agree && drift < 1e-4) {
        report.verdict = "stable-finite";
        return report;
    }
    auto total = [](const std::vector<int>& c) {
        int s = 0;
        for (int v : c) s += v;
        return s;
    };
    bool nondecreasing = true;
    for (size_t i = 1; i < report.counts.size(); ++i)
        nondecreasing = nondecreasing && total(report.counts[i]) >= total(report.counts[i - 1]);
    bool grew = total(report.counts.back()) > total(report.counts.front());
    report.verdict = (nondecreasing && grew) ? "growing" : "unresolved";
    return report;
}

StabilityReport refine_count(const MatrixSymbol& u, const KernelSymbol& k,
                             const BandSet& bands, const std::vector<int>& resolutions,
                             double margin, const AssembleOptions& options) {
    return refine_count(
        u, [&k](int) { return k; }, bands, resolutions, margin, options);
}

namespace {

// LU-based sign and log-magnitude of det(I + D_z Kw); throws when some
// U(x_i) - z I is near-singular (z touching the essential spectrum).
BsPoint bs_determinant(const std::vector<Eigen::MatrixXcd>& u_blocks,
                       const Eigen::MatrixXcd& kernel_w, int n, double z) {
    const std::int64_t m = static_cast<std::int64_t>(u_blocks.size());
    Eigen::MatrixXcd b = kernel_w;
    for (std::int64_t i = 0; i < m; ++i) {
        Eigen::MatrixXcd shifted = u_blocks[static_cast<size_t>(i)];
        shifted.diagonal().array() -= z;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            u_blocks[static_cast<size_t>(i)], Eigen::EigenvaluesOnly);
        double sep = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
            sep = std::min(sep, std::abs(es.eigenvalues()[j] - z));
        if (sep <= 1e-6)
            throw std::invalid_argument(
                "z = " + std::to_string(z) + " is inside or within 1e-6 of a band");
        b.block(n * i, 0, n, b.cols()) =
            shifted.partialPivLu().solve(b.block(n * i, 0, n, b.cols()));
    }
    b.diagonal().array() += 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b);
    double log_abs = 0.0;
    std::complex<double> phase =
        static_cast<double>(lu.permutationP().determinant());
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        std::complex<double> d = lu.matrixLU()(i, i);
        double a = std::abs(d);
        if (a == 0.0) return {z, 0, -std::numeric_limits<double>::infinity()};
        log_abs += std::log(a);
        phase *= d / a;
    }
    BsPoint point;
    point.z = z;
    point.log_abs_det = log_abs;
    if (std::abs(phase.imag()) > 1e-6)
        throw std::runtime_error("determinant indicator is not real at z = " +
                                 std::to_string(z));
    point.sign = phase.real() >= 0.0 ? 1 : -1;
    return point;
}

} // namespace

std::vector<BsPoint> birman_schwinger_scan(const MatrixSymbol& u, const KernelSymbol& k,
                                           const TorusGrid& grid,
                                           const std::vector<double>& z_samples) {
    if (u.nu != grid.nu || k.nu != grid.nu)
        throw std::invalid_argument("symbol dimension does not match grid");
    std::vector<Eigen::VectorXd> nodes = grid_nodes(grid);
    std::vector<Eigen::MatrixXcd> u_blocks(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        Eigen::MatrixXcd ui = u.eval(nodes[i]);
        u_blocks[i] = 0.5 * (ui + ui.adjoint());
    }
    Eigen::MatrixXcd kernel_w = kernel_matrix(k, nodes, grid.weight());

    std::vector<BsPoint> points;
    points.reserve(z_samples.size());
    for (double z : z_samples)
        points.push_back(bs_determinant(u_blocks, kernel_w, u.n, z));
    return points;
}

double birman_schwinger_root(const MatrixSymbol& u, const KernelSymbol& k,
                             const TorusGrid& grid, double z_lo, double z_hi,
                             double xtol) {
    std::vector<Eigen::VectorXd> nodes = grid_nodes(grid);
    std::vector<Eigen::MatrixXcd> u_blocks(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        Eigen::MatrixXcd ui = u.eval(nodes[i]);
        u_blocks[i] = 0.5 * (ui + ui.adjoint());
    }
    Eigen::MatrixXcd kernel_w = kernel_matrix(k, nodes, grid.weight());

    BsPoint lo = bs_determinant(u_blocks, kernel_w, u.n, z_lo);
    BsPoint hi = bs_determinant(u_blocks, kernel_w, u.n, z_hi);
    if (lo.sign == 0) return z_lo;
    if (hi.sign == 0) return z_hi;
    if (lo.sign == hi.sign)
        throw std::invalid_argument("determinant does not change sign on the bracket");

    double a = z_lo, b = z_hi;
    int a_sign = lo.sign;
    while (b - a > xtol) {
        double mid = 0.5 * (a + b);
        BsPoint pm = bs_determinant(u_blocks, kernel_w, u.n, mid);
        if (pm.sign == 0) return mid;
        if (pm.sign == a_sign)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

} // namespace fsw
