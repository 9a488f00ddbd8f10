#pragma once

// Essential spectrum of the operator: the union of bands swept by the sorted
// eigenvalue branches of U(x) as x ranges over the torus. Delta(x, z) is the
// characteristic determinant det(U(x) - z I); its zero set in z, over all x,
// is exactly that union. Gamma is the set of band endpoints, the only
// possible accumulation points of the discrete spectrum.

#include <vector>

#include <Eigen/Dense>

#include "fsw/numerics.hpp"
#include "fsw/symbols.hpp"
#include "fsw/torus.hpp"

namespace fsw {

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct BandSet {
    std::vector<Band> bands;         // merged, pairwise disjoint, ascending
    std::vector<Band> branch_ranges; // raw per-branch [min lambda_j, max lambda_j]
    std::vector<double> gamma;       // all endpoints of `bands`, sorted (2 per band)
    int resolution = 0;              // points per axis of the final scan
    bool refinement_converged = false;
    double endpoint_drift = 0.0;     // endpoint movement in the last refinement round

    // distance from z to the union of bands (0 inside)
    double distance(double z) const;
    // number of bands lying entirely below z; for z outside all bands this
    // labels the gap: 0 = below everything, bands.size() = above everything
    int gap_index(double z) const;
};

// det(U(x) - z I) for Hermitian U and real z. The determinant is computed in
// complex arithmetic; its imaginary part must not exceed 1e-10 in magnitude
// and is discarded. Throws if U(x) is not Hermitian within herm_tol.
double delta(const MatrixSymbol& u, const Eigen::VectorXd& x, double z,
             double herm_tol = 1e-10);

// x -> delta(u, x, z) as a reusable scalar field
ScalarField phi_z(const MatrixSymbol& u, double z);

// Band structure by scanning sorted eigenvalue branches on the grid, with
// golden-section polishing around each branch extremum, then doubling the
// grid until every endpoint moves less than endpoint_tol between rounds or
// refine_limit extra rounds are spent. Non-convergence is flagged, not fatal.
BandSet compute_bands(const MatrixSymbol& u, const TorusGrid& grid, int refine_limit,
                      double endpoint_tol = 1e-8);

struct GammaPoints {
    std::vector<double> values; // sorted, duplicates collapsed
    int collapsed = 0;          // endpoints merged away (degenerate point bands)
};

GammaPoints gamma_points(const BandSet& bands);

struct ExtremalVerdict {
    bool globally_extremal = false;
    double min_value = 0.0; // of phi_z over the scan
    double max_value = 0.0;
};

// Checks that 0 is attained by phi_z on the grid and that phi_z is one-sided
// (never crosses 0 beyond tol), i.e. z is a globally extremal value.
ExtremalVerdict verify_global_extremal(const MatrixSymbol& u, double z,
                                       const TorusGrid& grid, double tol);

} // namespace fsw
