#pragma once

// Nystrom discretization of the operator H = multiplication by U plus the
// integral operator with kernel K, dense Hermitian eigensolving, counting of
// eigenvalues outside the essential-spectrum bands, and a determinant scan
// of the resolvent-twisted kernel operator whose roots flag eigenvalues.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsw/bands.hpp"
#include "fsw/symbols.hpp"
#include "fsw/torus.hpp"

namespace fsw {

// matrix dimension n * N^nu exceeded the configured cap (CLI exit code 3)
struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssembleOptions {
    std::int64_t max_size = 8192; // hard cap on the matrix dimension
};

struct DiscretizedOperator {
    Eigen::MatrixXcd matrix; // Hermitian by construction
    TorusGrid grid;
    int n = 1;
    double herm_residue = 0.0; // ||H - H^*||_max / max(1, ||H||_max)
    bool real_valued = false;  // enables the real-symmetric eigensolver path
};

// Symmetric Nystrom matrix: H[(i,a),(j,b)] = delta_ij U(x_i)[a,b]
//                                          + sqrt(w_i w_j) K(x_i,x_j)[a,b].
// The upper triangle is mirrored and diagonal blocks averaged with their
// adjoints, so the result is exactly Hermitian. Separable kernels take a
// rank-r fast path (V diag(c) V^* instead of all node pairs).
DiscretizedOperator assemble(const MatrixSymbol& u, const KernelSymbol& k,
                             const TorusGrid& grid, const AssembleOptions& options = {});

// all eigenvalues, ascending
Eigen::VectorXd hermitian_eigenvalues(const DiscretizedOperator& op);

struct SpectralResult {
    std::vector<double> eigenvalues_outside; // ascending
    std::vector<int> gap_labels;             // parallel to eigenvalues_outside;
                                             // 0 = below all bands, bands.size() = above
    std::vector<int> counts_per_gap;         // size bands.size() + 1
    double margin = 0.0;
};

// Eigenvalues at distance > margin from every band, labeled by gap. Ritz
// values inside or near bands are discretization artifacts and are dropped.
SpectralResult eig_outside(const Eigen::VectorXd& eigenvalues, const BandSet& bands,
                           double margin);
SpectralResult eig_outside(const DiscretizedOperator& op, const BandSet& bands,
                           double margin);

struct StabilityReport {
    std::vector<int> resolutions;
    std::vector<std::vector<int>> counts;     // per resolution: counts per gap
    std::vector<std::vector<double>> outside; // per resolution: sorted gap eigenvalues
    double last_drift = 0.0; // matched eigenvalue movement between last two resolutions
    std::string verdict;     // "stable-finite" | "growing" | "unresolved"
};

// Re-assembles and re-counts at each resolution. "stable-finite" needs the
// last two resolutions to agree in every gap count with matched eigenvalue
// drift < 1e-4; monotonically growing totals report "growing" (the signature
// of an operator whose discrete spectrum keeps filling in under refinement).
StabilityReport refine_count(const MatrixSymbol& u, const KernelSymbol& k,
                             const BandSet& bands, const std::vector<int>& resolutions,
                             double margin, const AssembleOptions& options = {});

// Variant for kernels that legitimately change with resolution (e.g. a mode
// cutoff tied to N); `kernel_at` is invoked once per resolution.
StabilityReport refine_count(const MatrixSymbol& u,
                             const std::function<KernelSymbol(int)>& kernel_at,
                             const BandSet& bands, const std::vector<int>& resolutions,
                             double margin, const AssembleOptions& options = {});

struct BsPoint {
    double z = 0.0;
    int sign = 0;             // sign of det(I + B(z)); 0 means exactly singular
    double log_abs_det = 0.0; // log |det(I + B(z))|
};

// Determinant indicator of the twisted kernel operator
//   (B(z) f)(x) = integral of (U(x) - z I)^{-1} K(x, y) f(y) dy,
// discretized on the grid. det(I + B(z)) vanishes exactly at eigenvalues of
// the discretized H, so sign changes between consecutive samples bracket
// them. Every z must keep U(x) - z I invertible: min |lambda_j(x) - z| over
// nodes must exceed 1e-6, otherwise the call throws.
std::vector<BsPoint> birman_schwinger_scan(const MatrixSymbol& u, const KernelSymbol& k,
                                           const TorusGrid& grid,
                                           const std::vector<double>& z_samples);

// Bisection on the determinant sign; [z_lo, z_hi] must bracket a sign change.
double birman_schwinger_root(const MatrixSymbol& u, const KernelSymbol& k,
                             const TorusGrid& grid, double z_lo, double z_hi,
                             double xtol = 1e-10);

} // namespace fsw
